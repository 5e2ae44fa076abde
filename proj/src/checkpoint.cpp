// Copyright 2026 The dialplan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dialplan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "dialplan/errors.hpp"

namespace dialplan {
namespace {

constexpr char kMagic[4] = {'D', 'X', 'Q', 'H'};

template <typename U>
void put(std::vector<char>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<char>& out, double d) { put(out, std::bit_cast<std::uint64_t>(d)); }

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

  template <typename U>
  U get() {
    if (pos_ + sizeof(U) > bytes_.size()) throw IoError("checkpoint is truncated");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

void put_head(std::vector<char>& out, const MlpHead& head) {
  for (const DenseLayer& l : head.layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put_f64(out, l.weight(r, c));
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) put_f64(out, l.bias(i));
  }
}

void get_head(Reader& in, MlpHead& head) {
  for (DenseLayer& l : head.layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = in.get_f64();
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = in.get_f64();
  }
}

}  // namespace

void save_checkpoint(const QHeadParams& params, const std::string& path) {
  std::vector<char> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, params.step);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.online.layers.size()));
  for (const DenseLayer& l : params.online.layers) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.weight.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(l.weight.cols()));
  }
  put_head(out, params.online);
  put_head(out, params.target);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write checkpoint " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path);
}

QHeadParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read checkpoint " + path);
  Reader in(std::vector<char>(std::istreambuf_iterator<char>(f), {}));
  if (in.bytes().size() < 4 || std::memcmp(in.bytes().data(), kMagic, 4) != 0) {
    throw FormatVersionMismatch(path + " is not a value-head checkpoint");
  }
  in.get<std::uint32_t>();  // magic
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatVersionMismatch("checkpoint version " + std::to_string(version) +
                                ", expected " + std::to_string(kCheckpointVersion));
  }
  QHeadParams p;
  p.step = in.get<std::uint64_t>();
  const auto layers = in.get<std::uint32_t>();
  if (layers != 3) throw FormatVersionMismatch("expected 3 layers, found " + std::to_string(layers));
  std::uint32_t rows[3], cols[3];
  for (int k = 0; k < 3; ++k) {
    rows[k] = in.get<std::uint32_t>();
    cols[k] = in.get<std::uint32_t>();
  }
  if (rows[2] != 1 || cols[1] != rows[0] || cols[2] != rows[1]) {
    throw FormatVersionMismatch("inconsistent layer shapes in " + path);
  }
  std::uint64_t values = 0;
  for (int k = 0; k < 3; ++k) values += std::uint64_t{rows[k]} * cols[k] + rows[k];
  if (in.remaining() / 16 < values) throw IoError("checkpoint is truncated");
  p.online = MlpHead::zeros(cols[0], rows[0], rows[1]);
  p.target = p.online;
  get_head(in, p.online);
  get_head(in, p.target);
  if (!in.at_end()) throw IoError("trailing bytes in checkpoint " + path);
  return p;
}

}  // namespace dialplan

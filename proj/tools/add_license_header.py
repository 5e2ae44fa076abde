#!/usr/bin/env python3
"""Prepend the license header to C++ sources that do not carry it yet."""

import argparse
import pathlib

ROOTS = ("include", "src", "tools", "tests", "python")
SUFFIXES = {".hpp", ".cpp", ".h"}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("header", type=pathlib.Path, help="file holding the header comment")
    ap.add_argument("--repo", type=pathlib.Path, default=pathlib.Path(__file__).resolve().parents[1])
    args = ap.parse_args()

    header = args.header.read_text().rstrip("\n") + "\n\n"
    first_line = header.splitlines()[0]
    changed = 0
    for root in ROOTS:
        for path in sorted((args.repo / root).rglob("*")):
            if path.suffix not in SUFFIXES or not path.is_file():
                continue
            text = path.read_text()
            if text.startswith(first_line):
                continue
            path.write_text(header + text)
            changed += 1
    print(f"updated {changed} files")


if __name__ == "__main__":
    main()

"""Interchange normal forms for the programs in programs.do.

Pure statements slide past everything; effects keep their relative order.
"""

from pathlib import Path

from effmealy.donotation import normalize, parse, prog_equal

HERE = Path(__file__).resolve().parent


def main():
    sig, progs = parse((HERE / "programs.do").read_text())
    for a, b in [("pq", "qp"), ("early", "late"), ("effects_ab", "effects_ba")]:
        print(f"{a} == {b}: {prog_equal(progs[a], progs[b])}")
    print()
    print(normalize(progs["early"]))


if __name__ == "__main__":
    main()

"""Print the kappa tables for the two worked examples, evaluated and depth-checked."""

from localunits.cli import main

if __name__ == "__main__":
    for p, r, i in ((5, 3, 11899), (5, 5, 92729)):
        print(f"# p={p} r={r} i={i}")
        main(["kappa", "--p", str(p), "--r", str(r), "--i", str(i)])
        print()

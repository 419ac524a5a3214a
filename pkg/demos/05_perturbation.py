"""Small perturbations that make an operator attain its reduced minimum modulus."""

from opgamma import lazy_ops as lz
from opgamma.lazy_ops import FormulaTail, LazyOperator

cases = {
    "diag(1 + 1/n)": LazyOperator.diagonal((), FormulaTail([1, 1], [0, 1], 1.0, "decreasing")),
    "diag(1/n)": LazyOperator.diagonal((), FormulaTail([1], [0, 1], 0.0, "decreasing")),
    "diag(0, 1/n ...)": LazyOperator.diagonal([0], FormulaTail([1], [0, 1], 0.0, "decreasing")),
}

for name, L in cases.items():
    r = lz.moduli(L)
    print(f"{name}: gamma = {r.gamma}, attained: {r.attains_reduced_min}")
    for eps in (0.5, 0.1, 0.01):
        S, Lp, cert = lz.perturb_to_attain(L, eps)
        rp = lz.moduli(Lp)
        print(f"  eps={eps:<5} {cert.branch:9s} ||S|| = {cert.s_norm:<6g} new gamma = {rp.gamma:<6g}"
              f" at e_{rp.gamma_witness}, same kernel: {lz.null_set(Lp) == lz.null_set(L)}")

# When gamma > 0 only one weight moves: the first one within eps/2 of gamma
# is pulled down onto gamma.
L = cases["diag(1 + 1/n)"]
S, Lp, cert = lz.perturb_to_attain(L, 0.1)
n0 = cert.witness_index
print(f"\nrank-one move at index {n0}: {L.weights[n0].real:.4f} -> {Lp.weights[n0].real}")

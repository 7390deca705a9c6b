# scripts/simulate_scenarios.py
import json
import os
import sys

# Add project root to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

import numpy as np

from src.data.generators import ClassSpec, GeneratorKind, generate, paper_example_41, perturb
from src.reporting.report import analyze
from src.utils.config import load_tolerances


def show(title, T, tol):
    report = analyze(T, tol)
    v = report.verdict
    print(f"--- {title} ---")
    print(json.dumps({
        "dim": report.input.rows,
        "defect": report.condition.fong_tsui.residual,
        "asymmetry": report.condition.self_adjoint.residual,
    }, indent=2))
    print(f"|T| <= |Re T|: {'HOLDS ✅' if v.condition_holds else 'FAILS ❌'}")
    print(f"Self-adjoint: {v.self_adjoint}")
    print(f"Applicable results: {', '.join(v.applicable) or 'none'}")
    if v.soundness_violation:
        print("🚨 SOUNDNESS VIOLATION")
    print()


def simulate():
    tol = load_tolerances()

    print("🧪 Running worked scenarios for |T| <= |Re T|...\n")

    # scenario 1: the nilpotent block [[0, I], [0, 0]]; products with the polar factor are exact
    T, _ = paper_example_41(2)
    show("Scenario 1: nilpotent block", T.astype(np.complex128), tol)

    # scenario 2: a random symmetry satisfies everything
    S = generate(ClassSpec(GeneratorKind.SYMMETRY, 4, seed=7), tol)
    show("Scenario 2: symmetry", S, tol)

    # scenario 3: the same Hermitian contraction before and after a small perturbation
    H = generate(ClassSpec(GeneratorKind.SELF_ADJOINT_CONTRACTION, 4, seed=3), tol)
    show("Scenario 3a: Hermitian contraction", H, tol)
    show("Scenario 3b: perturbed by 1e-3", perturb(H, 1e-3, seed=3), tol)


if __name__ == "__main__":
    simulate()

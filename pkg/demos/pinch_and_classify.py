"""Pinch observables to a product basis and compare numeric verdicts with
the analytic classifier for the underlying classical process."""

import numpy as np

import spinsource as ss


def main():
    basis = ss.computational_basis()

    # the conditional expectation keeps the diagonal and kills the rest
    a = ss.random_observable(2, seed=3)
    pinched = ss.conditional_expectation(a, basis)
    print("off-diagonal mass before:", np.sum(np.abs(a.entries - np.diag(np.diag(a.entries)))))
    print("off-diagonal mass after :", np.sum(np.abs(pinched.entries - np.diag(np.diag(pinched.entries)))))

    report = ss.verify_expectation_properties(basis, sites=2, seed=1)
    print("property check passed:", report.passed)

    # diagonal states are classical measures and the bridge is exact
    table = np.array([[0.4, 0.1], [0.3, 0.2]])
    rho = ss.measure_to_state(table, basis)
    print("round trip exact:", np.array_equal(ss.state_to_measure(rho, basis), table))

    # every diagonal lift of a classical process lands where the analytic
    # classifier says it should
    chains = {
        "iid(0.8,0.2)": ss.IIDProcess([0.8, 0.2]),
        "markov aperiodic": ss.MarkovProcess([[0.9, 0.1], [0.2, 0.8]]),
        "markov period-2": ss.MarkovProcess([[0.0, 1.0], [1.0, 0.0]]),
        "iid mixture": ss.MixtureProcess(
            [0.5, 0.5], [ss.IIDProcess([0.9, 0.1]), ss.IIDProcess([0.1, 0.9])]
        ),
    }
    print(f"\n{'process':18s} {'oracle':22s} {'numeric':22s}")
    for name, chain in chains.items():
        oracle = ss.classify_process(chain)
        lift = ss.ClassicallyCorrelatedSource(chain, ss.computational_alphabet(2))
        sweep = ss.sweep_report(lift, n_max=1500, backend="transfer", seed=2)
        numeric = tuple(v == "pass" for v in sweep.verdicts)
        mark = "agree" if numeric == oracle.verdicts else "DISAGREE"
        print(f"{name:18s} {str(oracle.verdicts):22s} {str(numeric):22s} {mark}")


if __name__ == "__main__":
    main()

"""Build spin-chain sources from classical processes and check their laws."""

import numpy as np

import spinsource as ss


def show(name, report):
    flag = "ok " if report.passed else "BAD"
    print(f"  [{flag}] {name:34s} worst={report.worst_deviation:.2e} at {report.worst_pair}")


def main():
    chain = ss.MarkovProcess([[0.9, 0.1], [0.2, 0.8]])
    print("stationary distribution:", ss.stationary_distribution(chain.transition)[0])

    # two pure states per symbol; they do not need to be orthogonal
    alphabet = np.array([[1, 0], [2**-0.5, 2**-0.5]], dtype=complex)
    source = ss.construct_classically_correlated(chain, alphabet)

    print("\nfirst marginal of the correlated source:")
    print(np.round(source.density(1).entries.real, 6))

    print("\nfamily checks up to 5 sites:")
    show("markov + nonorthogonal alphabet", ss.check_consistency(source, 5))
    show("same, leading reductions", ss.check_stationarity(source, 5))

    # a channel transform keeps both laws intact
    noisy = ss.channel_transform_source(source, ss.depolarizing_channel(0.3))
    show("after depolarizing(0.3)", ss.check_consistency(noisy, 5))
    show("after depolarizing(0.3), leading", ss.check_stationarity(noisy, 5))

    # starting the chain away from its stationary distribution breaks
    # stationarity but not consistency
    skewed = ss.construct_classically_correlated(
        ss.MarkovProcess([[0.9, 0.1], [0.2, 0.8]], initial=[1.0, 0.0]),
        ss.computational_alphabet(2),
    )
    show("non-stationary start, trailing", ss.check_consistency(skewed, 5))
    show("non-stationary start, leading", ss.check_stationarity(skewed, 5))

    # correlations: dense construction vs the transfer evaluation
    a = ss.word_projector((0,))
    dense = ss.source_correlation(source, a, a, range(4), backend="dense")
    transfer = ss.source_correlation(source, a, a, range(4), backend="transfer")
    print("\ncorr by gap (dense)   :", np.round(dense.real, 6))
    print("corr by gap (transfer):", np.round(transfer.real, 6))
    print("agreement:", np.max(np.abs(dense - transfer)))


if __name__ == "__main__":
    main()

"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to get one pass/fail line
per criterion.
"""

import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from causalwhatif.cli import main as cli_main
from causalwhatif.dataset import compute_stats, ingest_csv, standardize
from causalwhatif.engine import (
    TrackerState,
    initial_profile,
    non_impacting,
    predict,
    restore,
    save_state,
    set_value,
)
from causalwhatif.graph import CausalDag, topo_order
from causalwhatif.model_io import (
    load_model_file,
    parse_graph_text,
    save_model_file,
)
from causalwhatif.realism import fit_gmm, label_for_score, posteriors
from causalwhatif.search import pc_search
from causalwhatif.sem import fit_indices, fit_paths, implied_covariance
from causalwhatif.service import create_app
from causalwhatif.sim import LinearScm, random_scm, simulate, true_model

import conftest
from conftest import (
    FIVE_NODE_BETA,
    HOUSING_CSV,
    HOUSING_DAG,
    five_node_model,  # noqa: F401  (fixture)
    make_csv,
    suite,
)


def report(name: str, ok: bool = True):
    print(f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'}")


# ---------------------------------------------------------------------------
# Criterion 1: coefficient recovery on the 20-SCM suite
# ---------------------------------------------------------------------------


def test_coefficient_recovery_within_tolerance():
    instances = suite()  # fixture construction stays outside the timed window
    start = time.perf_counter()
    for i, scm in enumerate(instances):
        data = simulate(scm, 20_000, np.random.default_rng(conftest.SUITE_SEED + i))
        model = fit_paths(standardize(data, compute_stats(data)), scm.dag)
        for edge, true_beta in scm.beta.items():
            assert model.beta[edge] == pytest.approx(true_beta, abs=0.02), (i, edge)
        for node, true_psi in scm.psi.items():
            assert model.residual_variance[node] == pytest.approx(true_psi, abs=0.03), (i, node)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"coefficient recovery took {elapsed:.1f}s (budget 10s)"
    report(f"coefficient recovery (beta +-0.02, psi +-0.03, {elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# Criteria 2 and 3: prediction vs. brute-force oracle; intervention screening
# ---------------------------------------------------------------------------


def random_triples(n_triples: int):
    """(model, profile) pairs over fresh random DAGs with random interventions."""
    rng = np.random.default_rng(conftest.SUITE_SEED ^ 0xABCDEF)
    for i in range(n_triples):
        scm = random_scm(int(rng.integers(0, 2**31)), int(rng.integers(4, 9)),
                         edge_prob=0.4)
        model = true_model(scm)
        profile = initial_profile(model, "A")
        for v in scm.dag.exogenous:
            if rng.random() < 0.7:
                profile = set_value(model, profile, v, float(rng.normal()))
        candidates = [v for v in model.dag.endogenous if v != model.dag.outcome]
        for v in candidates:
            if rng.random() < 0.4:
                profile = set_value(model, profile, v, float(rng.normal()))
        yield scm, model, profile, rng


def matrix_oracle(model, profile) -> dict[str, float]:
    """Solve (I - B_active) z = c in one shot; fixed nodes carry c."""
    order = topo_order(model.dag)
    n = len(order)
    B = np.zeros((n, n))
    c = np.zeros(n)
    for i, v in enumerate(order):
        if model.dag.role(v) == "exogenous" or v in profile.interventions:
            c[i] = profile.values.get(v, 0.0)
        else:
            for u in model.dag.parents(v):
                B[i, order.index(u)] = model.beta[(u, v)]
    z = np.linalg.solve(np.eye(n) - B, c)
    return dict(zip(order, z))


def test_prediction_matches_brute_force_oracle_on_1000_triples():
    for i, (scm, model, profile, _) in enumerate(random_triples(1000)):
        result = predict(model, profile)
        expected = matrix_oracle(model, profile)
        for v, z in expected.items():
            assert abs(result.values[v] - z) < 1e-9, (i, v)
    report("prediction correctness (1e-9 vs (I-B_active)^-1 oracle, 1000 triples)")


def test_intervention_screening_exact_zero_on_1000_triples():
    for i, (scm, model, profile, rng) in enumerate(random_triples(1000)):
        blocked = non_impacting(model, profile)
        baseline = predict(model, profile).outcome
        for v in blocked:
            perturbed = set_value(model, profile, v, float(rng.normal() * 5.0))
            assert predict(model, perturbed).outcome == baseline, (i, v)
    report("intervention screening (perturbing non-impacting nodes changes outcome by exactly 0)")


def test_intervention_regimes_reproduce_path_equations(five_node_model):
    m = five_node_model
    b = FIVE_NODE_BETA
    rng = np.random.default_rng(9)
    a, bb, c, d = (float(x) for x in rng.normal(size=4))

    # All features pinned: outcome depends on the outcome's parents alone.
    p = initial_profile(m, "A")
    for node, value in (("A", a), ("B", bb), ("C", c), ("D", d)):
        p = set_value(m, p, node, value)
    full = predict(m, p)
    assert full.outcome == pytest.approx(
        b[("C", "E")] * c + b[("D", "E")] * d, abs=1e-12)
    assert full.inactive_edges == frozenset({("A", "C"), ("B", "C"), ("B", "D")})

    # A, B, C pinned: D is re-estimated from B.
    p = initial_profile(m, "A")
    for node, value in (("A", a), ("B", bb), ("C", c)):
        p = set_value(m, p, node, value)
    partial = predict(m, p)
    d_est = b[("B", "D")] * bb
    assert partial.values["D"] == pytest.approx(d_est, abs=1e-12)
    assert partial.outcome == pytest.approx(
        b[("C", "E")] * c + b[("D", "E")] * d_est, abs=1e-12)

    # Only exogenous pinned: the full path equations appear.
    p = initial_profile(m, "A")
    for node, value in (("A", a), ("B", bb)):
        p = set_value(m, p, node, value)
    free = predict(m, p)
    c_est = b[("A", "C")] * a + b[("B", "C")] * bb
    assert free.values["C"] == pytest.approx(c_est, abs=1e-12)
    assert free.outcome == pytest.approx(
        b[("C", "E")] * c_est + b[("D", "E")] * (b[("B", "D")] * bb), abs=1e-12)
    assert free.inactive_edges == frozenset()
    report("intervention regimes reproduce the printed path equations symbolically")


# ---------------------------------------------------------------------------
# Criterion 4: PC structure recovery
# ---------------------------------------------------------------------------


def unshielded_colliders(dag: CausalDag):
    adj = {v: set(dag.parents(v)) | set(dag.children(v)) for v in dag.nodes}
    out = []
    for z in dag.nodes:
        parents = sorted(dag.parents(z))
        for i in range(len(parents)):
            for j in range(i + 1, len(parents)):
                x, y = parents[i], parents[j]
                if y not in adj[x]:
                    out.append((x, z, y))
    return out


def test_pc_recovery_on_suite():
    instances = suite()
    start = time.perf_counter()
    for i, scm in enumerate(instances):
        rng = np.random.default_rng(conftest.SUITE_SEED + 500 + i)
        data = simulate(scm, 50_000, rng)
        result = pc_search(data, alpha=0.01, max_cond=3)

        true_adj = {frozenset(e) for e in scm.dag.directed_edges}
        found_adj = {frozenset(e) for e in result.directed_edges} | set(result.undirected_edges)
        tp = len(true_adj & found_adj)
        precision = tp / len(found_adj) if found_adj else 1.0
        recall = tp / len(true_adj) if true_adj else 1.0
        f1 = (2 * precision * recall / (precision + recall)) if (precision + recall) else 0.0
        assert f1 == 1.0, f"instance {i}: skeleton F1={f1:.3f}"

        for x, z, y in unshielded_colliders(scm.dag):
            assert (x, z) in result.directed_edges, (i, x, z, y)
            assert (y, z) in result.directed_edges, (i, x, z, y)
        # orientation soundness: nothing directed against the generator
        for src, dst in result.directed_edges:
            assert (src, dst) in scm.dag.directed_edges, (i, src, dst)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"PC suite took {elapsed:.1f}s (budget 30s)"

    # Chains stay undirected (Markov equivalence).
    for seed in range(3):
        rng = np.random.default_rng(900 + seed)
        n = 50_000
        x = rng.normal(size=n)
        z = 0.6 * x + np.sqrt(1 - 0.36) * rng.normal(size=n)
        y = 0.5 * z + np.sqrt(1 - 0.25) * rng.normal(size=n)
        from causalwhatif.dataset import Dataset

        chain = Dataset(("X", "Y", "Z"), np.column_stack([x, y, z]))
        g = pc_search(chain, alpha=0.01)
        assert not g.directed_edges
        assert g.undirected_edges == frozenset({frozenset(("X", "Z")), frozenset(("Z", "Y"))})
    report(f"PC recovery (skeleton F1=1.0, colliders oriented, chains undirected, {elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# Criterion 5: fit indices behave
# ---------------------------------------------------------------------------


def drop_strongest_edge(scm: LinearScm, model) -> CausalDag:
    strongest = max(model.beta, key=lambda e: abs(model.beta[e]))
    return CausalDag(scm.dag.nodes, scm.dag.directed_edges - {strongest}, scm.dag.outcome)


def test_fit_indices_reward_truth_and_punish_misfit():
    for i, scm in enumerate(suite()):
        data = simulate(scm, 20_000, np.random.default_rng(conftest.SUITE_SEED + 900 + i))
        std = standardize(data, compute_stats(data))
        model = fit_paths(std, scm.dag)
        order = topo_order(scm.dag)
        idx = [std.column_index(v) for v in order]
        S = np.atleast_2d(np.corrcoef(std.rows[:, idx], rowvar=False))
        true_report = fit_indices(model, S, data.n, order=order)
        assert true_report.cfi >= 0.99, (i, true_report)
        assert true_report.rmsea <= 0.02, (i, true_report)

        reduced_dag = drop_strongest_edge(scm, model)
        reduced = fit_paths(std, reduced_dag)
        reduced_order = topo_order(reduced_dag)
        idx2 = [std.column_index(v) for v in reduced_order]
        S2 = np.atleast_2d(np.corrcoef(std.rows[:, idx2], rowvar=False))
        reduced_report = fit_indices(reduced, S2, data.n, order=reduced_order)
        drop = true_report.cfi - reduced_report.cfi
        assert drop >= 0.05, f"instance {i}: CFI dropped only {drop:.3f}"

        # Saturated-equivalent check: feeding the model its own implied
        # matrix must put the discrepancy at zero.
        sigma, sigma_order = implied_covariance(model)
        saturated = fit_indices(model, sigma, data.n, order=sigma_order)
        assert abs(saturated.chi_square) < 1e-6 * (data.n - 1), i
    report("fit indices (CFI >= 0.99 / RMSEA <= 0.02 on truth; strongest-edge deletion drops CFI >= 0.05; T ~ 0 saturated)")


# ---------------------------------------------------------------------------
# Criterion 6: housing anchors (soft)
# ---------------------------------------------------------------------------

HOUSING_ANCHORS = {"cfi": 0.951, "gfi": 0.950, "agfi": 0.919, "rmsea": 0.0997}


def test_housing_anchor_indices():
    if not HOUSING_CSV.exists():
        report("housing anchors", ok=False)
        pytest.fail(
            "data/housing.csv is absent: this build environment has no network "
            "route to fetch the Harrison & Rubinfeld housing data (package "
            "mirror is allowlisted, general DNS disabled). Run "
            "scripts/fetch_housing.py on a networked machine, commit "
            "data/housing.csv, and re-run. The criterion is implemented in "
            "full below and runs whenever the file exists."
        )
    data, _ = ingest_csv(HOUSING_CSV)
    edges, outcome = parse_graph_text(HOUSING_DAG.read_text(encoding="utf-8"))
    nodes = tuple(sorted({v for e in edges for v in e}))
    dag = CausalDag(nodes, frozenset(edges), outcome)
    from causalwhatif.dataset import Dataset

    sub = Dataset(tuple(dag.nodes), np.column_stack([data.column(v) for v in dag.nodes]))
    std = standardize(sub, compute_stats(sub))
    model = fit_paths(std, dag)
    order = topo_order(dag)
    idx = [std.column_index(v) for v in order]
    S = np.atleast_2d(np.corrcoef(std.rows[:, idx], rowvar=False))
    rep = fit_indices(model, S, sub.n, order=order)
    for key, anchor in HOUSING_ANCHORS.items():
        assert getattr(rep, key) == pytest.approx(anchor, abs=0.05), (key, rep)
    report("housing anchors (fit indices within +-0.05 of the published values)")


# ---------------------------------------------------------------------------
# Criterion 7: Gaussian mixture behavior
# ---------------------------------------------------------------------------


def test_gmm_em_and_label_anchors():
    rng = np.random.default_rng(31337)
    from causalwhatif.dataset import Dataset

    offset = np.array([5.0, 0.0, 0.0])
    cloud = np.vstack([
        rng.normal(size=(2000, 3)) - offset,
        rng.normal(size=(2000, 3)) + offset,
    ])
    d = Dataset(("a", "b", "c"), cloud)

    # 100 seeded runs; the EM loop asserts nondecreasing log-likelihood at
    # every iteration internally, so finishing means monotonicity held.
    for seed in range(100):
        g = fit_gmm(d, k=2, seed=seed, max_iter=60)
        assert np.isfinite(g.log_likelihood)

    g = fit_gmm(d, k=2, seed=0)
    means = g.means[np.argsort(g.means[:, 0])]
    assert np.linalg.norm(means[0] - (-offset)) < 0.1
    assert np.linalg.norm(means[1] - offset) < 0.1

    for _ in range(200):
        x = rng.normal(size=3) * 4
        post = posteriors(g, x)
        assert abs(post.sum() - 1.0) < 1e-9

    assert label_for_score(1.0) == "Common"
    assert label_for_score(0.5) == "Moderately Common"
    assert label_for_score(0.0) == "Rare"
    report("GMM (EM monotone over 100 seeds, posteriors sum to 1, clusters within 0.1, label anchors)")


# ---------------------------------------------------------------------------
# Criterion 8: tracker restore identity; model-file bit-exact round trip
# ---------------------------------------------------------------------------


def test_tracker_restore_identity_on_random_states():
    rng = np.random.default_rng(4242)
    for trial in range(50):
        scm = random_scm(7000 + trial, int(rng.integers(4, 8)))
        model = true_model(scm)
        tracker = TrackerState()
        saved_profiles = []
        for _ in range(int(rng.integers(1, 6))):
            p = initial_profile(model, "A")
            for v in scm.dag.nodes:
                if v != scm.dag.outcome and rng.random() < 0.5:
                    p = set_value(model, p, v, float(rng.normal()))
            q = initial_profile(model, "B") if rng.random() < 0.5 else None
            tracker = save_state(tracker, model, p, q)
            saved_profiles.append((p, q))
        for index, (p, q) in enumerate(saved_profiles):
            _, ra, rb = restore(tracker, index)
            assert ra == p and rb == q
    report("tracker (restore of save is the identity on randomized states)")


def test_model_file_round_trip_bit_exact_100_models(tmp_path):
    from test_model_io import random_fitted_model

    for seed in range(100):
        model = random_fitted_model(seed)
        path = tmp_path / f"model_{seed}.json"
        save_model_file(path, model)
        loaded, _, _ = load_model_file(path)
        assert loaded.beta == model.beta
        assert loaded.residual_variance == model.residual_variance
        np.testing.assert_array_equal(loaded.exo_corr, model.exo_corr)
        np.testing.assert_array_equal(loaded.stats.mean, model.stats.mean)
        np.testing.assert_array_equal(loaded.stats.std, model.stats.std)
        np.testing.assert_array_equal(loaded.stats.min, model.stats.min)
        np.testing.assert_array_equal(loaded.stats.max, model.stats.max)
        assert loaded.fit == model.fit
        assert loaded.accuracy == model.accuracy
    report("model file (bit-exact round trip on 100 randomized fitted models)")


# ---------------------------------------------------------------------------
# Criterion 9: CLI against service; non-impacting what-if column
# ---------------------------------------------------------------------------


def test_cli_predict_equals_service_predict_byte_for_byte(tmp_path, capsys):
    scm = conftest.five_node_scm()
    data = simulate(scm, 1500, np.random.default_rng(60))
    csv_path = make_csv(data, tmp_path / "d.csv")
    graph_path = tmp_path / "g.txt"
    graph_path.write_text(
        "A -> C\nB -> C\nB -> D\nC -> E\nD -> E\noutcome: E\n", encoding="utf-8")
    model_path = tmp_path / "m.json"
    assert cli_main(["fit", str(csv_path), str(graph_path), "E",
                     "--seed", "1", "--out", str(model_path)]) == 0
    capsys.readouterr()

    assignments = [("B", 1.25), ("C", -0.75)]
    args = ["predict", str(model_path)] + [f"{k}={v}" for k, v in assignments]
    assert cli_main(args) == 0
    cli_out = capsys.readouterr().out
    cli_values = {}
    cli_non_impacting = []
    cli_inactive = []
    for line in cli_out.strip().splitlines():
        parts = line.split("\t")
        if parts[0] == "value":
            cli_values[parts[1]] = parts[2]
        elif parts[0] == "non_impacting":
            cli_non_impacting.append(parts[1])
        elif parts[0] == "inactive_edge":
            cli_inactive.append([parts[1], parts[2]])

    app = create_app(data_dir=tmp_path / "svc")
    with TestClient(app) as client:
        payload = json.loads(model_path.read_text())
        sid = client.post("/api/v1/sessions", json={"model": payload}).json()["session_id"]
        state = None
        for node, value in assignments:
            state = client.post(
                f"/api/v1/sessions/{sid}/profiles/A/values",
                json={"node": node, "value": value},
            ).json()
    prediction = state["profiles"]["A"]["prediction"]
    assert {k: repr(v) for k, v in prediction["values"].items()} == cli_values
    assert prediction["non_impacting"] == cli_non_impacting
    assert prediction["inactive_edges"] == cli_inactive

    # Sweeping a non-impacting variable must produce a constant column.
    assert cli_main([
        "whatif", str(model_path), "C=1.0", "D=0.0", "--vary", "A=-5:5:11",
    ]) == 0
    lines = capsys.readouterr().out.strip().splitlines()[1:]
    outcomes = {line.split("\t")[1] for line in lines}
    assert len(lines) == 11 and len(outcomes) == 1
    report("CLI goldens (predict equals service byte-for-byte; non-impacting sweep constant)")

"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. All comparisons are exact integer equality; the stated
wall-clock limits are asserted.
"""

import json
import random
import subprocess
import sys
import time

from netauction.instance_io import (
    GeneratorConfig,
    instance_stream,
    parse_instance,
    random_instance,
)
from netauction.market import build_bfs_tree, compute_market
from netauction.mechanisms import ReservePrice, run_ldm, run_ldm_tree, run_vcg_first_layer
from netauction.removed_sets import robust_mu
from netauction.verify import (
    check_invitation_ic,
    dna_mu_mechanism,
    run_properties,
    search_counterexample,
)
from netauction.welfare import brute_force_welfare, constrained_welfare

from conftest import DATA


def _finish(number: int, name: str, ok: bool, elapsed: float, limit: float) -> None:
    status = "PASS" if ok and elapsed < limit else "FAIL"
    print(f"{status} criterion-{number} {name} ({elapsed:.2f}s / limit {limit:.0f}s)")
    assert ok, f"criterion {number} ({name}) failed"
    assert elapsed < limit, f"criterion {number} exceeded {limit}s ({elapsed:.2f}s)"


def test_criterion_1_figure3_reproduction(capsys):
    started = time.perf_counter()
    profile = parse_instance((DATA / "fig3.json").read_text())
    ids = {profile.label_of(i): i for i in profile.reports}
    tree = build_bfs_tree(compute_market(profile))

    ldm = run_ldm_tree(tree, 2)
    layer1, layer2 = ldm.trace.layers
    intermediates_ok = (
        layer1.sw == 12
        and layer1.sw_minus_d[ids["b"]] == 8
        and layer1.sw_minus_d[ids["c"]] == 9
        and layer2.sw == 18
        and layer2.sw_minus_d[ids["d"]] == 16
    )
    payments_ok = (
        ldm.payment_of(ids["a"]) == 0
        and ldm.payment_of(ids["b"]) == -4
        and ldm.payment_of(ids["c"]) == 4
        and ldm.payment_of(ids["d"]) == 9
        and ldm.revenue == 9
    )
    vcg = run_vcg_first_layer(compute_market(profile))
    vcg_ok = (vcg.payment_of(ids["b"]) == 1 and vcg.payment_of(ids["c"]) == 2
              and vcg.revenue == 3)

    # the CLI path reports the same numbers
    from netauction.cli import main
    assert main(["run", str(DATA / "fig3.json"), "--mechanism", "ldm",
                 "--format", "json"]) == 0
    run_doc = json.loads(capsys.readouterr().out)
    assert main(["run", str(DATA / "fig3.json"), "--mechanism", "vcg-l1",
                 "--format", "json"]) == 0
    vcg_doc = json.loads(capsys.readouterr().out)
    cli_ok = run_doc["revenue"] == 9 and vcg_doc["revenue"] == 3

    elapsed = time.perf_counter() - started
    with capsys.disabled():
        _finish(1, "figure-3-reproduction",
                intermediates_ok and payments_ok and vcg_ok and cli_ok, elapsed, 1.0)


def test_criterion_2_oracle_equivalence(capsys):
    started = time.perf_counter()
    rng = random.Random("oracle-equivalence")
    pool = GeneratorConfig(seed=201, buyers=(2, 10), k=(1, 4), v_max=12)
    checked = 0
    ok = True
    instance_index = 0
    while checked < 5000:
        profile = random_instance(pool, instance_index)
        instance_index += 1
        market = compute_market(profile)
        ids = sorted(market.valid)
        if not ids:
            continue
        for _ in range(10):
            if checked >= 5000:
                break
            included = frozenset(rng.sample(ids, min(len(ids), rng.randint(1, 8))))
            k = rng.randint(1, 4)
            fixed = {}
            remaining = k
            for i in sorted(included):
                if remaining and rng.random() < 0.25:
                    units = rng.randint(0, min(remaining, profile.k))
                    fixed[i] = units
                    remaining -= units
            greedy = constrained_welfare(market, included, fixed, k)
            oracle = brute_force_welfare(market, included, fixed, k)
            if greedy.welfare != oracle.welfare:
                ok = False
            checked += 1
    elapsed = time.perf_counter() - started
    with capsys.disabled():
        _finish(2, f"oracle-equivalence ({checked} subproblems)", ok, elapsed, 60.0)


def test_criterion_3_ldm_property_suite(capsys):
    started = time.perf_counter()
    properties = ("ir", "invite-ic", "value-ic", "non-wasteful", "dominance",
                  "decomposition", "child-monotonicity", "order-independence")
    configs = (
        GeneratorConfig(seed=301, buyers=(2, 8), k=(1, 3), v_max=10, topology="tree"),
        GeneratorConfig(seed=302, buyers=(2, 8), k=(1, 3), v_max=10,
                        topology="graph", edge_density=0.15),
    )
    premise_gap = []
    other = []
    total = 0
    for config in configs:
        for profile in instance_stream(config, 500):
            total += 1
            for result in run_properties(profile, "ldm", properties):
                if result.ok:
                    continue
                entry = (config.seed, total, result.prop, result.detail)
                if result.prop == "child-monotonicity":
                    # distinguish the documented theorem-premise gap (an
                    # observer hurt by another buyer's last-child deletion,
                    # with the deviator-side incentives intact) from any
                    # genuine incentive failure
                    from netauction.verify import check_invitation_ic as _cic
                    from netauction.verify import check_ir as _cir
                    from netauction.verify import ldm_mechanism as _ldm
                    mech = _ldm(robust_mu(profile))
                    deviator_clean = not _cic(mech, profile) and not _cir(mech, profile)
                    last_child_deletions = all(
                        not r.truthful_report.invited for r in result.reports
                    )
                    if deviator_clean and last_child_deletions:
                        premise_gap.append(entry)
                        continue
                other.append(entry)
    elapsed = time.perf_counter() - started
    with capsys.disabled():
        for v in other[:10]:
            print("unexpected violation:", v)
        for v in premise_gap:
            print("theorem-premise gap (literal child-monotonicity):", v)
        if premise_gap:
            print("note: the blanket same-layer monotonicity premise is "
                  "falsifiable for this mechanism (last-child deletion flips "
                  "the diffuser/winner split and reshapes the lower layer); "
                  "deviator-side IR/IC are clean on the affected instances. "
                  "Analysis: notes/decisions.md; regression: "
                  "test_verify.test_child_monotonicity_literal_form_is_falsifiable_for_ldm.")
        clean = 10 * total - len(premise_gap)
        detail = (f"ldm-property-suite ({total} instances; {clean} of {10 * total} "
                  f"property checks clean; {len(premise_gap)} literal "
                  f"child-monotonicity premise gap(s))")
        assert not other and total == 1000, f"criterion 3 broke beyond the known gap: {other[:5]}"
        # The remaining assertion is faithful to the criterion as stated and is
        # expected to FAIL: the blanket monotonicity premise the criterion
        # inherits from the source theorem is falsifiable for this mechanism
        # (see notes/decisions.md and
        # test_verify.test_child_monotonicity_literal_form_is_falsifiable_for_ldm).
        _finish(3, detail, not premise_gap, elapsed, 600.0)


def test_criterion_4_dna_mu_falsification(capsys):
    started = time.perf_counter()
    config = GeneratorConfig(seed=113, buyers=(5, 7), k=(4, 4), v_max=10,
                             topology="tree", max_depth=3, seller_bias=0.45)
    report = search_counterexample(dna_mu_mechanism(),
                                   instance_stream(config, 100_000), 100_000)
    found = report is not None
    shape_ok = replay_ok = frozen_ok = False
    if found:
        # the failure mode: she cannot win by inviting, wins by hiding
        shape_ok = (report.kind == "invitation-ic"
                    and report.deviating_utility > report.truthful_utility
                    and report.deviating_report.invited < report.truthful_report.invited)
        replays = check_invitation_ic(dna_mu_mechanism(), report.instance)
        replay_ok = bool(replays) and replays[0].buyer == report.buyer
        from netauction.instance_io import serialize_instance
        frozen_ok = serialize_instance(report.instance) == \
            (DATA / "dna_mu_counterexample.json").read_text()
    elapsed = time.perf_counter() - started
    with capsys.disabled():
        _finish(4, "dna-mu-falsification",
                found and shape_ok and replay_ok and frozen_ok, elapsed, 300.0)


def test_criterion_5_reserve_price_dominance(capsys):
    started = time.perf_counter()
    config = GeneratorConfig(seed=401, buyers=(2, 8), k=(1, 3), v_max=10,
                             topology="graph", edge_density=0.1)
    ok = True
    rows = 0
    for profile in instance_stream(config, 200):
        market = compute_market(profile)
        mu = robust_mu(profile)
        for r in range(6):
            reserve = ReservePrice(r)
            ldm = run_ldm(market, mu, reserve)
            vcg = run_vcg_first_layer(market, reserve)
            rows += 1
            if ldm.revenue < vcg.revenue:
                ok = False
    elapsed = time.perf_counter() - started
    with capsys.disabled():
        _finish(5, f"reserve-price-dominance ({rows} rows)", ok and rows == 1200,
                elapsed, 120.0)


def test_criterion_6_determinism(capsys):
    started = time.perf_counter()
    fig3 = str(DATA / "fig3.json")
    t4 = str(DATA / "t4.json")
    commands = [
        ["run", fig3, "--mechanism", "ldm", "--trace", "--format", "json"],
        ["run", fig3, "--mechanism", "dna-mu"],
        ["verify", t4, "--mechanism", "ldm", "--all"],
        ["gen", "--seed", "5", "--n", "6", "--k", "2", "-o", "/dev/stdout"],
        ["compare", "--gen", "seed=3,n=2..6", "--count", "8", "--reserve", "0..3"],
        ["search", "--mechanism", "dna-mu", "--gen", "seed=113,n=5..7,k=4,depth=3,bias=0.45",
         "--budget", "5100"],
    ]
    ok = True
    for command in commands:
        outputs = []
        for _ in range(2):
            proc = subprocess.run([sys.executable, "-m", "netauction.cli"] + command,
                                  capture_output=True)
            outputs.append((proc.returncode, proc.stdout))
        if outputs[0] != outputs[1]:
            ok = False
    elapsed = time.perf_counter() - started
    with capsys.disabled():
        _finish(6, "byte-identical-reruns", ok, elapsed, 120.0)

"""Executable properties: IR/IC deviation enumeration, axiom checks,
dominance comparisons, the payment decomposition, child monotonicity, and
randomized counterexample search.

Checkers treat a mechanism as a black box over report profiles. Utilities are
always evaluated against the buyer's TRUE values from the untouched instance;
the market is recomputed for every deviation, so buyers disconnected by a
deviation correctly earn zero. Enumeration is falsification only: an empty
report list means no violation was found at the enumerated granularity, not a
proof.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import ContractError, SearchBudgetExceeded, TraceMissing
from .market import (
    BuyerId,
    Market,
    Money,
    ReportProfile,
    ReportedType,
    TreeMarket,
    ValuationVector,
    build_bfs_tree,
    compute_market,
    cumulative_value,
    is_dummy,
)
from .mechanisms import (
    LdmTrace,
    Outcome,
    ReservePrice,
    outcome_welfare,
    run_dna_mu,
    run_ldm,
    run_ldm_tree,
    run_vcg_first_layer,
)
from .removed_sets import robust_mu

MAX_INVITES_EXHAUSTIVE = 6
DEFAULT_GRID_CAP = 128


@dataclass(frozen=True)
class MechanismUnderTest:
    """A named mechanism plus an optional fast path for value-only deviations.

    `run` is the full pipeline from a report profile. `tree_run`, when set,
    must be the same mechanism applied to a prebuilt BFS tree; checkers use it
    to rerun value misreports without rebuilding the tree (sound because the
    tree depends only on invitations).
    """

    name: str
    run: Callable[[ReportProfile], Outcome]
    tree_run: Callable[[TreeMarket], Outcome] | None = None


def ldm_mechanism(mu: int, reserve: ReservePrice | None = None) -> MechanismUnderTest:
    def run(profile: ReportProfile) -> Outcome:
        return run_ldm(compute_market(profile), mu, reserve)

    tree_run = None
    if reserve is None:
        def tree_run(tree: TreeMarket) -> Outcome:
            return run_ldm_tree(tree, mu, want_trace=False)

    return MechanismUnderTest("ldm", run, tree_run)


def dna_mu_mechanism(order: str = "id", seed: int | None = None) -> MechanismUnderTest:
    def run(profile: ReportProfile) -> Outcome:
        return run_dna_mu(build_bfs_tree(compute_market(profile)), order, seed)

    def tree_run(tree: TreeMarket) -> Outcome:
        return run_dna_mu(tree, order, seed)

    return MechanismUnderTest("dna-mu", run, tree_run)


def vcg_mechanism(reserve: ReservePrice | None = None) -> MechanismUnderTest:
    def run(profile: ReportProfile) -> Outcome:
        return run_vcg_first_layer(compute_market(profile), reserve)

    def tree_run(tree: TreeMarket) -> Outcome:
        return run_vcg_first_layer(tree.market, reserve)

    return MechanismUnderTest("vcg-l1", run, tree_run)


@dataclass(frozen=True)
class DeviationReport:
    """A found violation, replayable from the embedded instance.

    For "ir", "invitation-ic" and "value-ic" the reports are the buyer's own
    (deviating invitations only ever shrink). For "child-monotonicity" the
    reports belong to the same-layer buyer whose child set grew while `buyer`
    gained utility.
    """

    buyer: BuyerId
    truthful_report: ReportedType
    deviating_report: ReportedType
    truthful_utility: Money
    deviating_utility: Money
    mechanism: str
    instance: ReportProfile
    kind: str

    def sort_key(self):
        return (
            self.buyer,
            self.kind,
            tuple(sorted(self.deviating_report.invited)),
            self.deviating_report.values,
        )


def utility_of(truthful: ReportProfile, buyer: BuyerId, outcome: Outcome) -> Money:
    """True-value utility of `buyer` under `outcome`."""
    gained = cumulative_value(truthful.reports[buyer].values, outcome.units_of(buyer))
    return gained - outcome.payment_of(buyer)


def _subsets(invited: frozenset[BuyerId], proper_only: bool = False):
    if len(invited) > MAX_INVITES_EXHAUSTIVE:
        raise SearchBudgetExceeded(
            f"{len(invited)} invites exceed the exhaustive bound {MAX_INVITES_EXHAUSTIVE}"
        )
    elems = sorted(invited)
    top = len(elems) if proper_only else len(elems) + 1
    for r in range(top):
        for combo in itertools.combinations(elems, r):
            yield frozenset(combo)


def check_ir(mechanism: MechanismUnderTest, instance: ReportProfile) -> list[DeviationReport]:
    """Truthful values, every invitation subset: utility must be >= 0.

    Returned reports have deviating_utility < 0; truthful_utility is the
    full-invitation utility for context.
    """
    violations: list[DeviationReport] = []
    valid = compute_market(instance).valid
    full = mechanism.run(instance)
    for i in sorted(instance.reports):
        if i not in valid:
            continue
        rep = instance.reports[i]
        u_full = utility_of(instance, i, full)
        for sub in _subsets(rep.invited):
            if sub == rep.invited:
                u = u_full
            else:
                u = utility_of(
                    instance, i,
                    mechanism.run(instance.with_report(i, ReportedType(rep.values, sub))),
                )
            if u < 0:
                violations.append(DeviationReport(
                    buyer=i,
                    truthful_report=rep,
                    deviating_report=ReportedType(rep.values, sub),
                    truthful_utility=u_full,
                    deviating_utility=u,
                    mechanism=mechanism.name,
                    instance=instance,
                    kind="ir",
                ))
    return sorted(violations, key=DeviationReport.sort_key)


def check_invitation_ic(mechanism: MechanismUnderTest,
                        instance: ReportProfile) -> list[DeviationReport]:
    """Truthful values: full invitation must dominate every proper subset."""
    violations: list[DeviationReport] = []
    valid = compute_market(instance).valid
    full = mechanism.run(instance)
    for i in sorted(instance.reports):
        if i not in valid:
            continue
        rep = instance.reports[i]
        if not rep.invited:
            continue
        u_full = utility_of(instance, i, full)
        for sub in _subsets(rep.invited, proper_only=True):
            deviating = ReportedType(rep.values, sub)
            u = utility_of(instance, i, mechanism.run(instance.with_report(i, deviating)))
            if u > u_full:
                violations.append(DeviationReport(
                    buyer=i,
                    truthful_report=rep,
                    deviating_report=deviating,
                    truthful_utility=u_full,
                    deviating_utility=u,
                    mechanism=mechanism.name,
                    instance=instance,
                    kind="invitation-ic",
                ))
    return sorted(violations, key=DeviationReport.sort_key)


def integer_value_grid(instance: ReportProfile, buyer: BuyerId,
                       v_cap: int | None = None,
                       cap: int = DEFAULT_GRID_CAP) -> list[ValuationVector]:
    """Non-increasing integer vectors over {0..v_cap} (default: instance max + 2).

    When the full grid exceeds `cap`, a deterministic even stride keeps about
    `cap` vectors, always including the all-zero vector. The stride is an
    under-approximation: it can falsify IC but never certify it.
    """
    k = instance.k
    if v_cap is None:
        top = 0
        for rep in instance.reports.values():
            if rep.values and rep.values[0] > top:
                top = rep.values[0]
        v_cap = top + 2
    full = list(itertools.combinations_with_replacement(range(v_cap, -1, -1), k))
    if len(full) <= cap:
        return full
    stride = -(-len(full) // cap)
    picked = full[::stride]
    zero = (0,) * k
    if picked[-1] != zero:
        picked.append(zero)
    return picked


def check_value_ic(mechanism: MechanismUnderTest, instance: ReportProfile,
                   grid: Callable[[ReportProfile, BuyerId], Iterable[ValuationVector]] | None = None,
                   ) -> list[DeviationReport]:
    """For every buyer, invitation subset, and grid misreport: reporting true
    values must dominate the misreport at that same invitation set.

    Combined with check_invitation_ic this covers joint (value, invitation)
    deviations through the dominance chain full-truth >= (v, r-hat) >= (v-hat, r-hat).
    """
    if grid is None:
        grid = integer_value_grid
    violations: list[DeviationReport] = []
    valid = compute_market(instance).valid
    for i in sorted(instance.reports):
        if i not in valid:
            continue
        rep = instance.reports[i]
        vectors = [v for v in grid(instance, i) if v != rep.values]
        for sub in _subsets(rep.invited):
            base = instance.with_report(i, ReportedType(rep.values, sub))
            if mechanism.tree_run is not None:
                tree = build_bfs_tree(compute_market(base))
                u_base = utility_of(instance, i, mechanism.tree_run(tree))

                def outcome_for(v: ValuationVector) -> Outcome:
                    return mechanism.tree_run(tree.with_values(i, v))
            else:
                u_base = utility_of(instance, i, mechanism.run(base))

                def outcome_for(v: ValuationVector) -> Outcome:
                    return mechanism.run(base.with_report(i, ReportedType(v, sub)))

            for v in vectors:
                u_dev = utility_of(instance, i, outcome_for(v))
                if u_dev > u_base:
                    violations.append(DeviationReport(
                        buyer=i,
                        truthful_report=ReportedType(rep.values, sub),
                        deviating_report=ReportedType(v, sub),
                        truthful_utility=u_base,
                        deviating_utility=u_dev,
                        mechanism=mechanism.name,
                        instance=instance,
                        kind="value-ic",
                    ))
    return sorted(violations, key=DeviationReport.sort_key)


def check_non_wasteful(outcome: Outcome, instance: ReportProfile) -> bool:
    """All K units placed whenever any valid buyer exists (no-reserve runs only)."""
    market = compute_market(instance)
    if not market.valid:
        return sum(outcome.units.values()) == 0
    return sum(outcome.units.values()) == instance.k


@dataclass(frozen=True)
class VcgComparison:
    ldm_welfare: Money
    vcg_welfare: Money
    ldm_revenue: Money
    vcg_revenue: Money

    @property
    def welfare_dominates(self) -> bool:
        return self.ldm_welfare >= self.vcg_welfare

    @property
    def revenue_dominates(self) -> bool:
        return self.ldm_revenue >= self.vcg_revenue


def compare_vs_vcg(market: Market, mu: int,
                   reserve: ReservePrice | None = None) -> VcgComparison:
    """LDM and first-layer VCG on the same market, same reserve on both."""
    ldm = run_ldm(market, mu, reserve)
    vcg = run_vcg_first_layer(market, reserve)
    return VcgComparison(
        ldm_welfare=outcome_welfare(market, ldm),
        vcg_welfare=outcome_welfare(market, vcg),
        ldm_revenue=ldm.revenue,
        vcg_revenue=vcg.revenue,
    )


@dataclass(frozen=True)
class DecompositionRow:
    """Appendix split of one LDM payment: p = q - t.

    m counts the buyer's own tentative units plus her children's; t is the
    children's tentative value (the resale credit); q is the charge term.
    """

    buyer: BuyerId
    layer: int
    m: int
    q: Money
    t: Money
    p: Money


def payment_decomposition(outcome: Outcome, tree: TreeMarket, mu: int) -> list[DecompositionRow]:
    """Decompose every processed real buyer's payment and assert p = q - t."""
    trace = outcome.trace
    if not isinstance(trace, LdmTrace):
        raise TraceMissing("outcome carries no LDM trace")
    if mu != trace.mu:
        raise ContractError(f"mu={mu} does not match the traced run (mu={trace.mu})")
    run_tree = trace.tree
    rows: list[DecompositionRow] = []
    for rec in trace.layers:
        total = sum(rec.tentative_value.values())
        for i in sorted(rec.sw_minus_d):
            if is_dummy(i):
                continue
            children = run_tree.children[i]
            own_units = rec.tentative_units.get(i, 0)
            own_value = rec.tentative_value.get(i, 0)
            m = own_units + sum(rec.tentative_units.get(j, 0) for j in children)
            t = sum(rec.tentative_value.get(j, 0) for j in children)
            q = rec.sw_minus_d[i] - (total - t - own_value)
            p = outcome.payment_of(i)
            if p != q - t:
                raise ContractError(
                    f"decomposition identity failed for buyer {i}: p={p}, q-t={q - t}"
                )
            rows.append(DecompositionRow(buyer=i, layer=rec.layer, m=m, q=q, t=t, p=p))
    return rows


def check_decomposition_inequalities(rows: Sequence[DecompositionRow],
                                     vcg_outcome: Outcome) -> tuple[bool, bool]:
    """(sum of layer-1 q >= VCG revenue, per-layer sum q_l >= sum t_{l-1})."""
    by_layer: dict[int, list[DecompositionRow]] = {}
    for row in rows:
        by_layer.setdefault(row.layer, []).append(row)
    if not by_layer:
        return (vcg_outcome.revenue <= 0, True)
    first = sum(r.q for r in by_layer.get(1, ())) >= vcg_outcome.revenue
    second = True
    for layer in sorted(by_layer):
        if layer < 2:
            continue
        q_sum = sum(r.q for r in by_layer[layer])
        t_prev = sum(r.t for r in by_layer.get(layer - 1, ()))
        if q_sum < t_prev:
            second = False
    return (first, second)


def _tree_profile(instance: ReportProfile) -> tuple[ReportProfile, TreeMarket]:
    """The instance with invitations replaced by its BFS-tree child sets."""
    tree = build_bfs_tree(compute_market(instance))
    reports = dict(instance.reports)
    for i in tree.valid:
        reports[i] = ReportedType(instance.reports[i].values, tree.children[i])
    profile = ReportProfile(
        k=instance.k,
        seller_neighbors=instance.seller_neighbors,
        reports=reports,
        mu=instance.mu,
        labels=instance.labels,
    )
    return profile, tree


def check_child_monotonicity(mechanism: MechanismUnderTest,
                             instance: ReportProfile) -> list[DeviationReport]:
    """No same-layer buyer may gain utility from another buyer's extra children.

    Works on the instance's BFS tree: for each buyer j with children and each
    proper child subset, deleting the other subtrees must leave every
    same-layer observer's utility at least as high as under the full set.
    """
    base_profile, tree = _tree_profile(instance)
    full = mechanism.run(base_profile)
    violations: list[DeviationReport] = []
    for j in sorted(tree.valid):
        children = tree.children[j]
        if not children:
            continue
        layer = tree.market.layer_of[j]
        observers = [i for i in sorted(tree.layers[layer - 1]) if i != j]
        if not observers:
            continue
        full_rep = base_profile.reports[j]
        for sub in _subsets(children, proper_only=True):
            reduced = ReportedType(full_rep.values, sub)
            out = mechanism.run(base_profile.with_report(j, reduced))
            for i in observers:
                u_reduced = utility_of(base_profile, i, out)
                u_full = utility_of(base_profile, i, full)
                if u_reduced < u_full:
                    violations.append(DeviationReport(
                        buyer=i,
                        truthful_report=reduced,
                        deviating_report=full_rep,
                        truthful_utility=u_reduced,
                        deviating_utility=u_full,
                        mechanism=mechanism.name,
                        instance=instance,
                        kind="child-monotonicity",
                    ))
    return sorted(violations, key=DeviationReport.sort_key)


def search_counterexample(
    mechanism: MechanismUnderTest | Callable[[ReportProfile], MechanismUnderTest],
    generator: Iterable[ReportProfile],
    budget: int,
    include_value_ic: bool = False,
) -> DeviationReport | None:
    """Scan generated instances for an invitation-IC violation.

    `mechanism` is either fixed or a factory called per instance (so LDM runs
    can pin mu from each truthful network). Returns the first violation found
    within `budget` instances, or None; absence is a legal result.
    """
    for instance in itertools.islice(generator, budget):
        mech = mechanism if isinstance(mechanism, MechanismUnderTest) else mechanism(instance)
        found = check_invitation_ic(mech, instance)
        if not found and include_value_ic:
            found = check_value_ic(mech, instance)
        if found:
            return found[0]
    return None


PROPERTY_NAMES = (
    "ir",
    "invite-ic",
    "value-ic",
    "non-wasteful",
    "dominance",
    "decomposition",
    "child-monotonicity",
    "order-independence",
)


@dataclass(frozen=True)
class PropertyResult:
    prop: str
    ok: bool
    detail: str = ""
    reports: tuple[DeviationReport, ...] = ()


def _mechanism_by_name(name: str, mu: int, reserve: ReservePrice | None) -> MechanismUnderTest:
    if name in ("ldm", "ldm-tree"):
        return ldm_mechanism(mu, reserve)
    if name == "dna-mu":
        return dna_mu_mechanism()
    if name == "vcg-l1":
        return vcg_mechanism(reserve)
    raise ContractError(f"unknown mechanism {name!r}")


def run_properties(instance: ReportProfile, mechanism_name: str,
                   properties: Sequence[str], *, mu: int | None = None,
                   reserve: ReservePrice | None = None,
                   grid: Callable[[ReportProfile, BuyerId], Iterable[ValuationVector]] | None = None,
                   ) -> list[PropertyResult]:
    """Run the named property checks for one instance, in the given order.

    `dominance`, `decomposition` and `order-independence` are specific to the
    layer-based mechanism and refuse other mechanism names.
    """
    ldm_only = {"dominance", "decomposition", "order-independence"}
    pinned = 0
    if mechanism_name in ("ldm", "ldm-tree"):
        # Deviation re-runs need a mu that stays valid on every shrunken
        # profile; the reattachment-robust bound provides that default.
        if mu is not None:
            pinned = mu
        elif instance.mu is not None:
            pinned = instance.mu
        else:
            pinned = robust_mu(instance)
    mech = _mechanism_by_name(mechanism_name, pinned, reserve)
    results: list[PropertyResult] = []
    for prop in properties:
        if prop not in PROPERTY_NAMES:
            raise ContractError(f"unknown property {prop!r}")
        if prop in ldm_only and mechanism_name not in ("ldm", "ldm-tree"):
            raise ContractError(f"property {prop!r} requires the ldm mechanism")
        if prop == "ir":
            reports = check_ir(mech, instance)
            results.append(PropertyResult(prop, not reports, reports=tuple(reports)))
        elif prop == "invite-ic":
            reports = check_invitation_ic(mech, instance)
            results.append(PropertyResult(prop, not reports, reports=tuple(reports)))
        elif prop == "value-ic":
            reports = check_value_ic(mech, instance, grid)
            results.append(PropertyResult(prop, not reports, reports=tuple(reports)))
        elif prop == "non-wasteful":
            if reserve is not None:
                results.append(PropertyResult(prop, True, detail="skipped: reserve set"))
                continue
            ok = check_non_wasteful(mech.run(instance), instance)
            results.append(PropertyResult(prop, ok, detail="" if ok else "units unsold"))
        elif prop == "dominance":
            cmp = compare_vs_vcg(compute_market(instance), pinned, reserve)
            ok = cmp.welfare_dominates and cmp.revenue_dominates
            results.append(PropertyResult(
                prop, ok,
                detail=(f"welfare {cmp.ldm_welfare} vs {cmp.vcg_welfare}, "
                        f"revenue {cmp.ldm_revenue} vs {cmp.vcg_revenue}"),
            ))
        elif prop == "decomposition":
            market = compute_market(instance)
            if reserve is not None:
                out = run_ldm(market, pinned, reserve)
                tree = out.trace.tree
            else:
                tree = build_bfs_tree(market)
                out = run_ldm_tree(tree, pinned)
            try:
                rows = payment_decomposition(out, tree, pinned)
            except ContractError as exc:
                results.append(PropertyResult(prop, False, detail=str(exc)))
                continue
            vcg = run_vcg_first_layer(market, reserve)
            first, second = check_decomposition_inequalities(rows, vcg)
            ok = first and second
            detail = "" if ok else f"layer-1 charge bound: {first}, cross-layer bound: {second}"
            results.append(PropertyResult(prop, ok, detail=detail))
        elif prop == "child-monotonicity":
            reports = check_child_monotonicity(mech, instance)
            results.append(PropertyResult(prop, not reports, reports=tuple(reports)))
        elif prop == "order-independence":
            ok = check_order_independence(instance, pinned)
            results.append(PropertyResult(prop, ok, detail="" if ok else "order changed outcome"))
    return results


def check_order_independence(instance: ReportProfile, mu: int,
                             permutations: int = 3) -> bool:
    """Permuting the within-layer buyer loop must not change the LDM outcome."""
    tree = build_bfs_tree(compute_market(instance))
    base = run_ldm_tree(tree, mu, want_trace=False)
    ids = sorted(tree.valid)
    rng = random.Random(f"order:{len(ids)}:{instance.k}")
    for _ in range(permutations):
        perm = ids[:]
        rng.shuffle(perm)
        out = run_ldm_tree(tree, mu, order=perm, want_trace=False)
        if out.units != base.units or out.payments != base.payments:
            return False
    return True

"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

The lines are collected into an "acceptance criteria" section of the pytest
terminal summary.
"""

import io
import random
import subprocess
import sys

from tnuca.cli import main
from tnuca.dynamics import RECURRENT, TRANSIENT, evolve, recurrence_analysis
from tnuca.graphs import (
    alternating_euler_circuit,
    build_combined_diagram,
    connected_components,
    component_hamiltonian,
    euler_circuit,
    fully_eulerian,
    validate_circuit,
    validate_hamiltonian,
)
from tnuca.reach import (
    classify,
    find_restricted_initial_set,
    is_restricted_surjective,
    run_restriction_chain,
    theorem1_core,
    verify_restricted_reversible,
)
from tnuca.rules import build_global_map, eca
from tnuca.sequences import parse_sequence

import oracle


def test_criterion_1(report):
    got = build_global_map(eca(14), 4).non_reachable
    report("1", got == {7, 11, 13, 14, 15}, f"rule 14 n=4 non-reachable {sorted(got)}")


def test_criterion_2(report):
    core = theorem1_core(build_global_map(eca(3), 4), build_global_map(eca(15), 4))
    r = classify(3, 15, "A001651", 4)
    ok = core == frozenset() and not r.verdicts.restricted_surjective and bool(r.witnesses.never_reached)
    report("2", ok, f"common non-reachable {sorted(core)}, never reached {sorted(r.witnesses.never_reached)}")


def test_criterion_3(report):
    cases = [(170, 85, "A005408"), (15, 170, "A018252"), (51, 204, "A005408")]
    got = {c: classify(c[0], c[1], c[2], 4).verdicts.reversible for c in cases}
    report("3", all(got.values()), f"reversible {got}")


def test_criterion_4(report):
    v = classify(1470343891115, 5594248657947, "A001651", 3, k=3).verdicts
    report("4", v.reversible, f"3-state pair n=3 reversible={v.reversible}")


def test_criterion_5(report):
    rs = is_restricted_surjective(15, 25, "A001651", 5).holds
    s25 = build_global_map(eca(25), 5).surjective
    report("5", rs and not s25, f"restricted surjective={rs}, rule 25 surjective={s25}")


def test_criterion_6(report):
    cin = {0, 3, 5, 6, 9, 10, 12}
    given = verify_restricted_reversible(7, 40, "A001651", 4, cin).holds
    search = find_restricted_initial_set(7, 40, "A001651", 4)
    found = search.found and verify_restricted_reversible(7, 40, "A001651", 4, search.cin).holds
    report("6", given and found, f"given set verifies={given}, search {sorted(search.cin)} verifies={found}")


def test_criterion_7(report):
    r = classify(229, 85, "A001651", 5)
    images = {y for _, _, y in r.witnesses.collisions}
    ok = r.verdicts.weakly_reversible and not r.verdicts.restricted_reversible and {0, 31} <= images
    report(
        "7", ok,
        f"weakly={r.verdicts.weakly_reversible} restricted={r.verdicts.restricted_reversible} "
        f"collision images {sorted(images)} (0 is not an image of rule 229 at n=5)",
    )


def test_criterion_7_colliding_pair(report):
    # 0 and 31 as the colliding preimages of one image
    r = classify(229, 85, "A001651", 5)
    pairs = {(x1, x2) for x1, x2, _ in r.witnesses.collisions}
    ok = r.verdicts.weakly_reversible and not r.verdicts.restricted_reversible and (0, 31) in pairs
    report("7-preimages", ok, f"witness {r.witnesses.collision}")


def test_criterion_8(report):
    r = classify(14, 243, "A001651", 4)
    ok = r.verdicts.weakly_reversible and not r.f.bijective and not r.g.bijective
    report("8", ok, f"weakly={r.verdicts.weakly_reversible} bijective f={r.f.bijective} g={r.g.bijective}")


def test_criterion_9(report):
    (lam,) = recurrence_analysis(7, 40, "A001651", 4, 5, 10)
    checks = {
        "block": lam.block == (1, 1, 4),
        "K": lam.cycle_length == 6,
    }
    expected = [(5, 5, TRANSIENT), (5, 0, RECURRENT), (5, 15, RECURRENT), (9, 2, RECURRENT), (4, 2, TRANSIENT)]
    for c0, x, status in expected:
        (rec,) = recurrence_analysis(3, 15, "A001651", 4, c0, x)
        checks[f"{x} from {c0}"] = rec.status == status
    report("9", all(checks.values()), f"block {lam.block} K {lam.cycle_length}; {checks}")


def test_criterion_10(report):
    d = build_combined_diagram(210, 51, 5)
    fe = fully_eulerian(d).fully_eulerian
    big = max(connected_components(d), key=len)
    circ = alternating_euler_circuit(d, big)
    length = None if circ is None else len(circ)
    replay = False
    if circ:
        traj = evolve(210, 51, "pat:10", circ[0][0], len(circ), 5)
        replay = traj.codes == [circ[0][0]] + [w for _, w, _ in circ] and traj.codes[-1] == traj.codes[0]
    report("10", fe and length == 60 and replay, f"fully Eulerian={fe}, circuit length {length}, replay={replay}")


def test_criterion_11a(report):
    rng = random.Random(2024)
    specs = ["A005408", "A001651", "A018252", "pat:1101"]
    mismatches = 0
    for i in range(200):
        wf, wg = rng.randrange(256), rng.randrange(256)
        spec = specs[i % len(specs)]
        seq = parse_sequence(spec)
        chain = run_restriction_chain(wf, wg, seq, 4, horizon=64)
        sim = oracle.reach_by_simulation(wf, wg, lambda t: seq.rule_at(t).value == "F", 4, range(16), 64)
        mismatches += chain.reached != sim
    report("11a", mismatches == 0, f"{mismatches} mismatches over 200 pairs")


def test_criterion_11b(report):
    rng = random.Random(99)
    bij = [w for w in range(256) if build_global_map(eca(w), 4).bijective]
    failures = 0
    for i in range(50):
        wf, wg = rng.choice(bij), rng.choice(bij)
        spec = ["A005408", "A001651", "pat:1101", "pat:10011"][i % 4]
        for c0 in range(16):
            recs = recurrence_analysis(wf, wg, spec, 4, c0)
            failures += any(r.status != RECURRENT for r in recs)
            (own,) = recurrence_analysis(wf, wg, spec, 4, c0, c0)
            failures += own.status != RECURRENT
    report("11b", failures == 0, f"{failures} non-recurrent cases over 50 bijective pairs")


def _diagrams():
    rng = random.Random(7)
    pairs = [(210, 51, 5), (15, 180, 5), (14, 243, 4), (204, 204, 4), (7, 40, 4), (229, 85, 5)]
    pairs += [(rng.randrange(256), rng.randrange(256), rng.randrange(1, 7)) for _ in range(60)]
    return [build_combined_diagram(f, g, n) for f, g, n in pairs]


def test_criterion_11c(report):
    bad = 0
    diagrams = _diagrams()
    for d in diagrams:
        E = 2 * d.num_vertices
        bad += not (int(d.in_degree().sum()) == int(d.out_degree().sum()) == E)
    report("11c", bad == 0, f"{bad} degree-law violations over {len(diagrams)} diagrams")


def test_criterion_11d(report):
    bad = emitted = 0
    for d in _diagrams():
        for comp in connected_components(d):
            for circ, alt in ((euler_circuit(d, comp), False), (alternating_euler_circuit(d, comp), True)):
                if circ is not None:
                    emitted += 1
                    bad += not validate_circuit(d, circ, comp, alternating=alt)
            ham = component_hamiltonian(d, comp)
            if ham.cycle is not None:
                emitted += 1
                bad += not validate_hamiltonian(d, ham.cycle, comp)
    report("11d", bad == 0 and emitted > 0, f"{bad} invalid of {emitted} emitted circuits")


def test_criterion_11e(tmp_path, report):
    cases = [
        ["classify", "--f", "229", "--g", "85", "--n", "5", "--seq", "A001651"],
        ["diagram", "--f", "15", "--g", "180", "--n", "5", "--mode", "combined"],
        ["cycles", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651", "--init", "5"],
        ["graph", "--f", "210", "--g", "51", "--n", "5"],
    ]
    differing = []
    for argv in cases:
        outs = [subprocess.run([sys.executable, "-m", "tnuca", *argv], capture_output=True, check=True).stdout
                for _ in range(2)]
        if outs[0] != outs[1]:
            differing.append(argv[0])
    images = []
    for i in range(2):
        p = tmp_path / f"{i}.ppm"
        main(["spacetime", "--f", "90", "--g", "73", "--n", "64", "--seq", "A018252", "--steps", "64",
              "--init", "random:3", "--out", str(p)], out=io.StringIO())
        images.append(p.read_bytes())
    if images[0] != images[1]:
        differing.append("spacetime")
    report("11e", not differing, f"non-deterministic commands: {differing or 'none'}")

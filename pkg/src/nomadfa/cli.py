"""Command-line workbench: enumeration, dimension, witness, and learning
experiments driven by a TOML config, emitting CSV tables and JSON objects.

Outputs are deterministic functions of (config, seed): rows are canonically
ordered and every file embeds the config digest and the effective seed.
Exit codes: 0 success, 1 validation failure, 2 usage or config errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import advice_dfa, dimensions, fixtures, harness, witnesses
from .concepts import (
    all_concepts,
    handle_from_nominal_automata,
    handle_from_tables,
)
from .nominal import fN_pair
from .nominal_dfa import dfa_to_record, dimension_bound_check, minimize, short_witnesses, word_from_key
from .permgroup import enumerate_subgroups, subgroup_conjugacy_classes

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


class ConfigError(ValueError):
    pass


def load_config(path: str):
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        return tomllib.loads(raw.decode("utf-8")), digest
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as error:
        raise ConfigError(f"cannot parse {path}: {error}") from error


def write_csv(path: Path, header, rows, digest: str, seed: int):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_sha256={digest} seed={seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_json(path: Path, payload: dict, digest: str, seed: int):
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {"config_sha256": digest, "seed": seed}
    data.update(payload)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _advice_language_from_config(spec: dict) -> advice_dfa.LanguageTable:
    if "divisor" in spec:
        return advice_dfa.zero_count_override_language(int(spec["divisor"]), int(spec["m"]))
    sigma = tuple(spec.get("sigma", ["0", "1"]))
    horizon = int(spec["m"])
    accepted = set(spec.get("accepted", []))
    return advice_dfa.LanguageTable.from_predicate(sigma, horizon, lambda w: w in accepted)


def _hypothesis_handle(klass, kind: str, k: int, n: int, m: int):
    if kind == "class":
        return klass
    if kind == "double":
        return handle_from_tables(
            advice_dfa.languages_within_states(k, 2 * n, m), f"adv(k={k},n={2 * n},m={m})")
    if kind == "all":
        return all_concepts(klass.domain)
    raise ConfigError(f"unknown hypothesis kind {kind!r}")


def cmd_dims(config: dict, out: Path, digest: str, seed: int, jobs: int) -> int:
    section = config.get("dims", {})
    reports = []
    tasks = [("advice", dict(entry)) for entry in section.get("advice", [])]
    tasks += [("nominal", dict(entry)) for entry in section.get("nominal", [])]

    def build(task):
        setting, params = task
        return dimensions.bound_report(setting, **{k: int(v) for k, v in params.items()})

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        reports = list(pool.map(build, tasks))
    rows = [row.csv_values() for report in reports for row in report.rows]
    write_csv(out / "dims.csv", dimensions.BoundReport.CSV_HEADER, rows, digest, seed)
    print(f"wrote {out / 'dims.csv'} ({len(rows)} rows)")
    return EXIT_OK if all(report.all_ok() for report in reports) else EXIT_VALIDATION


def _learn_suite_rows(entry: dict):
    setting = entry.get("setting", "advice")
    learner = entry.get("learner", "halving")
    mode = entry.get("mode", "eq+mq")
    if setting == "advice":
        k, n, m = int(entry["k"]), int(entry["n"]), int(entry["m"])
        klass = handle_from_tables(advice_dfa.enumerate_class(k, n, m),
                                   f"adv(k={k},n={n},m={m})")
        hypotheses = _hypothesis_handle(klass, entry.get("hypothesis", "double"), k, n, m)
        params = f"k={k},n={n},m={m},H={entry.get('hypothesis', 'double')},{learner},{mode}"
    elif setting == "nominal":
        names = list(entry.get("fixtures", sorted(fixtures.FIXTURE_BUILDERS)))
        max_len = int(entry.get("max_word_length", 3))
        klass = handle_from_nominal_automata(
            [(name, fixtures.fixture(name)) for name in names], max_len)
        hypotheses = klass if entry.get("hypothesis", "class") == "class" \
            else all_concepts(klass.domain)
        params = f"fixtures={'+'.join(names)},len<={max_len},{learner},{mode}"
    else:
        raise ConfigError(f"unknown suite setting {setting!r}")
    return harness.run_suite(setting, params, klass, hypotheses, learner=learner, mode=mode)


def cmd_learn(config: dict, out: Path, digest: str, seed: int, jobs: int) -> int:
    suites = config.get("learn", {}).get("suites", [])
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        per_suite = list(pool.map(_learn_suite_rows, suites))
    rows = [row.csv_values() for suite_rows in per_suite for row in suite_rows]
    write_csv(out / "learn_transcripts.csv", harness.SUITE_COLUMNS, rows, digest, seed)
    summary = {"budget_factor": harness.QUERY_BUDGET_FACTOR, "suites": []}
    failed = False
    for suite_rows in per_suite:
        if not suite_rows:
            continue
        totals = [row.total for row in suite_rows]
        cd = suite_rows[0].cd_product
        degenerate = cd == 0
        entry = {
            "setting": suite_rows[0].setting,
            "params": suite_rows[0].params,
            "targets": len(suite_rows),
            "max_eq": max(row.eq for row in suite_rows),
            "max_mq": max(row.mq for row in suite_rows),
            "max_total": max(totals),
            "mean_total": sum(totals) / len(totals),
            "cd_product": None if cd == math.inf else cd,
            "bound_ok": all(row.bound_ok for row in suite_rows),
            "degenerate_cd": degenerate,
            "ratio_max_total_to_budget": (
                max(totals) / (harness.QUERY_BUDGET_FACTOR * cd)
                if cd not in (0, math.inf) else None),
        }
        if degenerate:
            entry["note"] = ("hypothesis class contains every concept, so the "
                             "dimension-product budget is vacuous")
        elif not entry["bound_ok"]:
            failed = True
        summary["suites"].append(entry)
    write_json(out / "learn_summary.json", summary, digest, seed)
    print(f"wrote {out / 'learn_transcripts.csv'} ({len(rows)} rows) and learn_summary.json")
    return EXIT_VALIDATION if failed else EXIT_OK


WITNESS_REPORT_HEADER = ["job", "kind", "status", "points", "claimed_bound",
                         "extensions_checked", "notes"]


def _run_witness_job(index: int, entry: dict, out: Path, digest: str, seed: int):
    kind = entry["kind"]
    name = entry.get("name", f"job{index}")
    alphabet = fixtures.atoms_alphabet()
    try:
        if kind == "advice-classes":
            table = _advice_language_from_config(entry["language"])
            n = int(entry["n"])
            witness = witnesses.advice_witness(table, n)
            klass = handle_from_tables(
                advice_dfa.enumerate_class(len(table.sigma), n, table.horizon))
            report = witnesses.validate_witness(
                witness, table.value,
                [(f"member{i}", member.value) for i, member in enumerate(klass.members)],
                extension_class=klass)
        elif kind in ("nominal-dimension", "nominal-orbits"):
            machine = minimize(fixtures.fixture(entry["fixture"])).automaton
            if kind == "nominal-dimension":
                witness = witnesses.nominal_dimension_witness(machine, int(entry["k"]))
            else:
                witness = witnesses.nominal_orbit_witness(machine, int(entry["n"]),
                                                          int(entry["k"]))

            def predicate(m):
                return lambda key: m.accepts_word(word_from_key(alphabet, key))

            fixture_names = entry.get("validate_against", [])
            report = witnesses.validate_witness(
                witness, predicate(machine),
                [(other, predicate(fixtures.fixture(other))) for other in fixture_names])
        elif kind == "non-equivariance":
            labeled = {key: int(bit) for key, bit in entry["table"].items()}
            witness = witnesses.non_equivariance_witness(alphabet, labeled)
            fixture_names = entry.get("validate_against", sorted(fixtures.FIXTURE_BUILDERS))

            def fixture_predicate(name):
                machine = fixtures.fixture(name)
                return lambda key: machine.accepts_word(word_from_key(alphabet, key))

            report = witnesses.validate_witness(
                witness, lambda key: labeled[key],
                [(name, fixture_predicate(name)) for name in fixture_names])
        else:
            raise ConfigError(f"unknown witness kind {kind!r}")
    except witnesses.NotAWitnessCaseError as error:
        return [name, kind, "skipped", "0", "", "", str(error)], False
    write_json(out / "witnesses" / f"{name}.json", {"witness": witness.to_record()},
               digest, seed)
    status = "ok" if report.ok else "failed"
    notes = "; ".join((*report.notes, *(f"agrees:{f}" for f in report.fixture_failures)))
    row = [name, kind, status, str(len(witness.points)), str(witness.claimed_bound),
           str(report.extensions_checked), notes]
    return row, not report.ok


def cmd_witness(config: dict, out: Path, digest: str, seed: int, jobs: int) -> int:
    entries = config.get("witness", {}).get("jobs", [])
    results = []
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(_run_witness_job, i, dict(entry), out, digest, seed)
                   for i, entry in enumerate(entries)]
        results = [f.result() for f in futures]
    rows = [row for row, _ in results]
    any_failed = any(failed for _, failed in results)
    write_csv(out / "witness_report.csv", WITNESS_REPORT_HEADER, rows, digest, seed)
    print(f"wrote {out / 'witness_report.csv'} ({len(rows)} rows)")
    return EXIT_VALIDATION if any_failed else EXIT_OK


def cmd_enumerate(config: dict, out: Path, digest: str, seed: int, jobs: int) -> int:
    del jobs
    section = config.get("enumerate", {})
    for entry in section.get("advice", []):
        k, n, m = int(entry["k"]), int(entry["n"]), int(entry["m"])
        tables = advice_dfa.enumerate_class(k, n, m)
        keys = advice_dfa.domain_strings(tables[0].sigma, m)
        rows = [[str(i), "".join(str(b) for b in t.bits)] for i, t in enumerate(tables)]
        path = out / f"enumerate_advice_k{k}n{n}m{m}.csv"
        write_csv(path, ["index", "bits:" + "|".join(keys)], rows, digest, seed)
        print(f"wrote {path} ({len(tables)} languages)")
    for entry in section.get("subgroups", []):
        degree = int(entry["degree"])
        groups = enumerate_subgroups(degree)
        table = subgroup_conjugacy_classes(degree)
        class_of = {}
        for index, cls in enumerate(table.classes):
            for member in cls:
                class_of[member.elements] = index
        rows = [[str(i), str(g.order), str(class_of[g.elements]),
                 ";".join(g.to_cycle_strings())]
                for i, g in enumerate(groups)]
        path = out / f"enumerate_subgroups_deg{degree}.csv"
        write_csv(path, ["index", "order", "conjugacy_class", "elements"], rows, digest, seed)
        print(f"wrote {path} ({len(groups)} subgroups, {table.class_count} classes)")
    return EXIT_OK


def verify_bounds_rows():
    """The desk-scale bound battery; every row lists both sides."""
    rows = []

    def check(name, lhs, rhs, ok):
        rows.append([name, str(lhs), str(rhs), str(bool(ok)).lower()])

    frozen_fn = {(1, 1): 2, (2, 1): 3, (2, 2): 7, (3, 2): 13, (3, 3): 34}
    for (k1, k2), expected in sorted(frozen_fn.items()):
        check(f"fN({k1},{k2})", fN_pair(k1, k2), expected, fN_pair(k1, k2) == expected)
    for k1 in range(7):
        for k2 in range(k1 + 1):
            value = fN_pair(k1, k2)
            lower = math.comb(k1, k2) * math.factorial(k2)
            upper = (2 * k1) ** k2
            check(f"fN_sandwich({k1},{k2})", f"{lower}<={value}", f"<={upper}",
                  lower <= value <= upper)
    for degree, (subgroups, classes) in {3: (6, 4), 4: (30, 11)}.items():
        check(f"subgroups_deg{degree}", len(enumerate_subgroups(degree)), subgroups,
              len(enumerate_subgroups(degree)) == subgroups)
        table = subgroup_conjugacy_classes(degree)
        check(f"conjugacy_classes_deg{degree}", table.class_count, classes,
              table.class_count == classes)
    expected_shape = {"aa": (4, 1), "empty": (1, 0), "full": (1, 0),
                      "first_last": (3, 1), "repeated_pair": (6, 2)}
    for name in sorted(fixtures.FIXTURE_BUILDERS):
        machine = minimize(fixtures.fixture(name)).automaton
        orbits, dim = expected_shape[name]
        check(f"minimize[{name}].orbits", machine.states.orbit_count, orbits,
              machine.states.orbit_count == orbits)
        check(f"minimize[{name}].dimension", machine.states.dimension, dim,
              machine.states.dimension == dim)
        report = dimension_bound_check(machine)
        check(f"dimension_bound[{name}]", report.state_dimension, f"<={report.bound}",
              report.ok)
        longest = max(len(word) for word in short_witnesses(machine).values())
        check(f"short_witnesses[{name}]", longest, f"<{machine.states.orbit_count}",
              longest < machine.states.orbit_count)
        again = minimize(machine).automaton
        check(f"minimize_idempotent[{name}]", again.states.orbit_count,
              machine.states.orbit_count,
              again.states.orbit_count == machine.states.orbit_count)
    reference = advice_dfa.zero_count_override_language(2, 4)
    worst = max(advice_dfa.mn_partition(reference, ell).class_count for ell in range(5))
    check("advice_reference_classes", worst, "<=2", worst <= 2)
    check("advice_reference_minimal_states", advice_dfa.minimal_states(reference), 4,
          advice_dfa.minimal_states(reference) == 4)
    check("advice_divisor3_minimal_states",
          advice_dfa.minimal_states(advice_dfa.zero_count_override_language(3, 4)), 6,
          advice_dfa.minimal_states(advice_dfa.zero_count_override_language(3, 4)) == 6)
    check("advice_reference_infeasible_on_3_states",
          advice_dfa.layered_feasible(reference, 3), False,
          advice_dfa.layered_feasible(reference, 3) is False)
    check("nominal_cdim_limit(4,1,1)", dimensions.nominal_cdim_limit(4, 1, 1), 960,
          dimensions.nominal_cdim_limit(4, 1, 1) == 960)
    return rows


def cmd_verify_bounds(config: dict, out: Path, digest: str, seed: int, jobs: int) -> int:
    del config, jobs
    rows = verify_bounds_rows()
    write_csv(out / "verify_bounds.csv", ["check", "value", "expected", "pass"],
              rows, digest, seed)
    failures = [row for row in rows if row[3] != "true"]
    print(f"wrote {out / 'verify_bounds.csv'} ({len(rows)} checks, {len(failures)} failures)")
    return EXIT_VALIDATION if failures else EXIT_OK


def cmd_fixtures(config: dict, out: Path, digest: str, seed: int, jobs: int) -> int:
    del config, jobs
    for name in sorted(fixtures.FIXTURE_BUILDERS):
        machine = fixtures.fixture(name)
        write_json(out / "fixtures" / f"{name}.json",
                   {"name": name, "automaton": dfa_to_record(machine)}, digest, seed)
        print(f"wrote {out / 'fixtures' / (name + '.json')}")
    for divisor in (2, 3):
        table = advice_dfa.zero_count_override_language(divisor, 4)
        write_json(out / "fixtures" / f"advice_divisor{divisor}.json",
                   {"name": f"advice_divisor{divisor}",
                    "language": advice_dfa.table_to_record(table)}, digest, seed)
        print(f"wrote {out / 'fixtures' / f'advice_divisor{divisor}.json'}")
    return EXIT_OK


COMMANDS = {
    "dims": cmd_dims,
    "learn": cmd_learn,
    "witness": cmd_witness,
    "enumerate": cmd_enumerate,
    "verify-bounds": cmd_verify_bounds,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nomadfa",
        description="Advice/nominal automata learnability workbench.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", default=None,
                         help="TOML experiment config (optional for fixture-only commands)")
        cmd.add_argument("--out", default="out", help="output directory")
        cmd.add_argument("--seed", type=int, default=None,
                         help="seed recorded in outputs (overrides the config)")
        cmd.add_argument("--jobs", type=int, default=1, help="worker threads")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        print("--jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    config: dict = {}
    digest = hashlib.sha256(b"").hexdigest()
    if args.config is not None:
        try:
            config, digest = load_config(args.config)
        except FileNotFoundError:
            print(f"config not found: {args.config}", file=sys.stderr)
            return EXIT_USAGE
        except ConfigError as error:
            print(str(error), file=sys.stderr)
            return EXIT_USAGE
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    try:
        return COMMANDS[args.command](config, Path(args.out), digest, seed, args.jobs)
    except ConfigError as error:
        print(str(error), file=sys.stderr)
        return EXIT_USAGE
    except (advice_dfa.BudgetExceededError, dimensions.BudgetExceededError) as error:
        print(f"budget exceeded: {error}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as error:
        print(f"missing config key: {error}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

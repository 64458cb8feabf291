"""
Command-line front end for challengetheory.

Usage:
    challengetheory classify problems.csv
    challengetheory ci problems.csv --params fixture:params_gains
    challengetheory fit problems.csv responses.csv --tying four --domain gain
    challengetheory compare problems.csv responses.csv --domain loss
    challengetheory cv problems.csv responses.csv --k 2 --seed 7
    challengetheory effects --fixtures mirror_pairs
    challengetheory subgroups problems.csv responses.csv
    challengetheory reproduce
    challengetheory simulate --problems-out p.csv --responses-out r.csv

Reports go to stdout (or --output); log lines go to stderr.
Exit codes: 0 ok, 1 usage, 2 parse, 3 validation, 4 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from challengetheory import __version__
from challengetheory.challengetheory import ChallengeTheory, FIXTURE_PREFIX, resolve_params
from challengetheory.datamodels import EFFECT_TABLE_ALIASES, BinaryProblem, DomainFilter, ParamSet, SearchConfig
from challengetheory.exceptions import ChallengeTheoryError, ParseError
from challengetheory.fit import bold_proportions
from challengetheory.model_challenge import challenge_table
from challengetheory.model_problems import mirror_problem
from challengetheory.samples import builtin_fixtures, synthetic_gain_problems
from challengetheory.synthetic import planted_dataset
from challengetheory.utils import load_problem_rows, load_problems, load_responses, render_report, write_problems, write_responses

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors instead of exiting with status 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--tying', choices=['three', 'four', 'six'], default='four',
                        help='Parameter tying scheme (default: four)')
    common.add_argument('--weighting', choices=['gw', 'tk92', 'identity'], default='gw',
                        help='Probability weighting form (default: gw)')
    common.add_argument('--domain', choices=['gain', 'loss', 'all'], default='gain',
                        help='Problems to use (default: gain)')
    common.add_argument('--seed', type=int, default=None, help='Random seed (default: from config, else 0)')
    common.add_argument('--starts', type=_nonnegative_int, default=None,
                        help='Latin-hypercube optimizer starts (default: 32)')
    common.add_argument('--jobs', type=_positive_int, default=None,
                        help='Optimizer starts run concurrently (default: 1)')
    common.add_argument('--config', type=Path, default=None, help='JSON file with search settings')
    common.add_argument('--params', default=None,
                        help='Parameters: fixture:NAME, or comma-separated numbers (gw: 3/4/6, tk92: 2/3/4 for three/four/six tying)')
    common.add_argument('--params-loss', default=None, help='Parameters for loss problems (same syntax)')
    common.add_argument('--format', choices=['csv', 'json'], default='csv', help='Report format (default: csv)')
    common.add_argument('--precision', type=int, default=4, help='Decimals in reports (default: 4)')
    common.add_argument('--output', '-o', type=Path, default=None, help='Write the report here instead of stdout')
    common.add_argument('--verbose', '-v', action='count', default=0, help='-v for progress, -vv for optimizer detail')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog='challengetheory',
                     description='Challenge index analyses for binary risky choice',
                     formatter_class=argparse.RawDescriptionHelpFormatter,
                     epilog=__doc__)
    parser.add_argument('--version', action='version', version=f'challengetheory {__version__}')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND', parser_class=_Parser)
    commands.required = True

    sub = commands.add_parser('classify', parents=[common], help='Canonicalize problems into default/bold form')
    sub.add_argument('problems', type=Path)

    sub = commands.add_parser('ci', parents=[common], help='Challenge index table')
    sub.add_argument('problems', type=Path)

    for name, help_text in (('fit', 'Fit parameters to observed bold proportions'),
                            ('compare', 'Fit and rank model variants'),
                            ('subgroups', 'Bold players and gender/earnings subgroup tests')):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument('problems', type=Path)
        sub.add_argument('responses', type=Path)

    sub = commands.add_parser('cv', parents=[common], help='Respondent-level k-fold cross-validation')
    sub.add_argument('problems', type=Path)
    sub.add_argument('responses', type=Path)
    sub.add_argument('--k', type=int, default=2, help='Number of folds (default: 2)')

    sub = commands.add_parser('effects', parents=[common], help='Effect rows for bundled problem pairs')
    sub.add_argument('--fixtures', choices=['mirror_pairs', 'effects', *EFFECT_TABLE_ALIASES],
                     default='mirror_pairs',
                     help='Effect table: mirror_pairs (alias table5) or effects (alias table4)')

    commands.add_parser('reproduce', parents=[common], help='Check recomputed values against published ones')

    sub = commands.add_parser('simulate', parents=[common], help='Write a planted synthetic dataset')
    sub.add_argument('--problems-out', type=Path, required=True)
    sub.add_argument('--responses-out', type=Path, required=True)
    sub.add_argument('--respondents', type=int, default=126)
    sub.add_argument('--noise', type=float, default=0.03)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s', force=True)


def _search_config(args: argparse.Namespace) -> SearchConfig:
    config = SearchConfig()
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot read config: {e}", path=str(args.config))
        config = SearchConfig.model_validate_json(text)
    overrides = {name: getattr(args, name) for name in ('seed', 'starts', 'jobs') if getattr(args, name) is not None}
    if overrides:
        config = SearchConfig(**{**config.model_dump(), **overrides})
    return config


def parse_params(text: Optional[str], weighting_form: str) -> Optional[ParamSet]:
    """--params value as a ParamSet; the count of numbers picks the tying for the weighting form."""
    if text is None:
        return ParamSet(tying='three', weighting_form='identity') if weighting_form == 'identity' else None
    if text.startswith(FIXTURE_PREFIX):
        try:
            return resolve_params(text)
        except ValueError as e:
            raise UsageError(str(e))
    try:
        values = [float(v) for v in text.split(',')]
    except ValueError:
        raise UsageError(f"--params must be fixture:NAME or comma-separated numbers, got {text!r}")
    if weighting_form == 'identity':
        raise UsageError("--weighting identity has no parameters; drop the --params numbers")
    counts = {len(ParamSet.free_names(t, weighting_form)): t for t in ('three', 'four', 'six')}
    tying = counts.get(len(values))
    if tying is None:
        allowed = ', '.join(str(n) for n in sorted(counts))
        raise UsageError(f"--params for {weighting_form} takes {allowed} numbers, got {len(values)}")
    return ParamSet.from_free(values, tying, weighting_form)


def _params_dict(params: ParamSet) -> Dict[str, float]:
    return {name: getattr(params, name) for name in ('a0', 'a1', 'gamma0', 'gamma1', 'delta0', 'delta1')}


def _metadata(args: argparse.Namespace, config: SearchConfig, **extra: Any) -> Dict[str, Any]:
    metadata = {
        'command': args.command,
        'version': __version__,
        'fixtures_version': builtin_fixtures().version,
        'seed': config.seed,
        'starts': config.starts,
        'tying': args.tying,
        'weighting': args.weighting,
        'domain': args.domain,
    }
    metadata.update(extra)
    return metadata


def _load_dataset(args: argparse.Namespace):
    rows = load_problem_rows(args.problems)
    return load_responses(args.responses, rows)


def cmd_classify(args, config) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    problems = load_problems(args.problems)
    rows = [{
        'id': p.id,
        'domain': p.domain,
        'default_x': p.default_prospect.outcome, 'default_p': p.default_prospect.probability,
        'bold_x': p.bold_prospect.outcome, 'bold_p': p.bold_prospect.probability,
    } for p in problems]
    return rows, _metadata(args, config)


def cmd_ci(args, config):
    problems = load_problems(args.problems)
    params = parse_params(args.params, args.weighting)
    if params is None:
        raise UsageError("ci needs --params (fixture:NAME or numbers) unless --weighting identity")
    return challenge_table(problems, params), _metadata(args, config, params=args.params or "identity")


def cmd_fit(args, config):
    dataset = _load_dataset(args)
    theory = ChallengeTheory(args.tying, args.weighting, config)
    result = theory.fit(dataset, args.domain)
    domains = {p.id: p.domain for p in dataset.problems}
    rows = [{'id': pid, 'domain': domains[pid], 'p_bold': p, 'ci': ci}
            for pid, p, ci in zip(result.problem_ids, result.p_bold, result.ci_values)]
    report = result.correlation_report
    return rows, _metadata(args, config, r=result.r, ci_low=report.ci_low, ci_high=report.ci_high, n=report.n,
                           evaluations=result.objective_evaluations, converged=result.converged,
                           **_params_dict(result.params))


def cmd_compare(args, config):
    dataset = _load_dataset(args)
    comparison = ChallengeTheory(args.tying, args.weighting, config).compare(dataset, args.domain)
    rows = [{'variant': row.variant, 'n_free': row.n_free, 'r': row.r, **_params_dict(row.params),
             'evaluations': row.fit.objective_evaluations} for row in comparison]
    return rows, _metadata(args, config)


def cmd_cv(args, config):
    dataset = _load_dataset(args)
    report = ChallengeTheory(args.tying, args.weighting, config).cross_validate(dataset, args.domain, args.k, config.seed)
    rows = []
    for fold in report.folds:
        free = dict(zip(fold.train_fit.params.free_names(report.tying, report.weighting_form),
                        fold.train_fit.params.free_values()))
        rows.append({'fold': fold.label, 'n_train': len(fold.train_ids), 'n_test': len(fold.test_ids),
                     'train_r': fold.train_fit.r, **free, 'test_r': fold.test_r})
    rows.append({'fold': 'Average', 'n_train': None, 'n_test': None, 'train_r': report.train_r_mean,
                 **report.param_means, 'test_r': report.test_r_mean})
    return rows, _metadata(args, config, k=args.k)


def cmd_effects(args, config):
    fixtures = builtin_fixtures()
    params_gain = parse_params(args.params, args.weighting) or fixtures.params['params_gains']
    params_loss = parse_params(args.params_loss, args.weighting) or fixtures.params['params_losses']
    theory = ChallengeTheory(params_gain=params_gain, params_loss=params_loss)
    rows = [{
        'label': row.label,
        'problems': [p.id for p in row.problems],
        'percent_bold': [None if p is None else p * 100.0 for p in row.p_bold_observed],
        'ci_x100': row.ci_times_100,
        'delta_ci_x100': row.delta_ci_times_100,
    } for row in theory.effects(fixtures.effect_items(args.fixtures))]
    return rows, _metadata(args, config, fixtures=args.fixtures)


def cmd_subgroups(args, config):
    dataset = _load_dataset(args)
    theory = ChallengeTheory(args.tying, args.weighting, config)
    domains = ('gain', 'loss') if args.domain == 'all' else (args.domain,)
    rows, thresholds = [], {}
    for domain in domains:
        summary = theory.bold_players(dataset, domain)
        thresholds[f'threshold_{domain}'] = summary.threshold
        rows.extend(row.model_dump() for row in summary.subgroup_rows)
    return rows, _metadata(args, config, **thresholds)


def cmd_reproduce(args, config):
    checks = ChallengeTheory().reproduce()
    failed = sum(1 for c in checks if c['status'] == 'FAIL')
    return checks, _metadata(args, config, checks=len(checks), failed=failed)


def _simulated_problems(domain: DomainFilter) -> List[BinaryProblem]:
    gains = synthetic_gain_problems()
    losses = [mirror_problem(p).model_copy(update={'id': f'{p.id}_loss'}) for p in gains]
    return {'gain': gains, 'loss': losses, 'all': gains + losses}[domain]


def cmd_simulate(args, config):
    fixtures = builtin_fixtures()
    params_gain = parse_params(args.params, args.weighting) or fixtures.params['params_gains']
    params_loss = parse_params(args.params_loss, args.weighting) or fixtures.params['params_losses']
    problems = _simulated_problems(args.domain)
    dataset = planted_dataset(problems, params_gain, params_loss, n_respondents=args.respondents,
                              noise=args.noise, seed=config.seed)
    write_problems(dataset.problems, args.problems_out)
    write_responses(dataset, args.responses_out)
    rows = [{'id': o.problem.id, 'domain': o.problem.domain, 'p_bold': o.p_bold}
            for o in bold_proportions(dataset)]
    return rows, _metadata(args, config, respondents=args.respondents, noise=args.noise,
                           problems_out=str(args.problems_out), responses_out=str(args.responses_out))


COMMANDS = {
    'classify': cmd_classify,
    'ci': cmd_ci,
    'fit': cmd_fit,
    'compare': cmd_compare,
    'cv': cmd_cv,
    'effects': cmd_effects,
    'subgroups': cmd_subgroups,
    'reproduce': cmd_reproduce,
    'simulate': cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    _configure_logging(args.verbose)
    try:
        config = _search_config(args)
        rows, metadata = COMMANDS[args.command](args, config)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ChallengeTheoryError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VALIDATION

    text = render_report(rows, metadata, args.format, args.precision)
    if args.output is not None:
        args.output.write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text)

    if args.command == 'reproduce' and metadata['failed']:
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

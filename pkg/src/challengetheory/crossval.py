import logging
import string
from typing import List, Optional
import numpy as np
from challengetheory.datamodels import (
    ChoiceDataset, CrossValFold, CrossValReport, DomainFilter, SearchConfig, Tying, WeightingForm,
)
from challengetheory.exceptions import DomainError, TooFewRespondentsError
from challengetheory.fit import bold_proportions, fit_params
from challengetheory.model_challenge import challenge_indices
from challengetheory.stats import pearson_r

logger = logging.getLogger(__name__)


def split_respondents(dataset: ChoiceDataset, k: int = 2, seed: int = 0) -> List[List[str]]:
    """
    Random partition of the respondents into k folds.

    Fold sizes differ by at most one, larger folds first. Ids inside a fold
    keep dataset order.

    Raises:
        DomainError: k < 2
        TooFewRespondentsError: Fewer than 2k respondents
    """
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    ids = dataset.respondent_ids
    if len(ids) < 2 * k:
        raise TooFewRespondentsError(f"{k}-fold split needs at least {2 * k} respondents, got {len(ids)}")
    order = np.random.default_rng(seed).permutation(len(ids))
    return [[ids[i] for i in sorted(part)] for part in np.array_split(order, k)]


def _test_order(k: int) -> List[int]:
    return [1, 0] if k == 2 else list(range(k))


def _fold_label(k: int, test_index: int) -> str:
    letters = string.ascii_uppercase
    name = lambda i: letters[i] if i < len(letters) else f"F{i + 1}"
    train = "+".join(name(i) for i in range(k) if i != test_index)
    return f"{train} => {name(test_index)}"


def fold_labels(k: int) -> List[str]:
    """Fold labels, "training => testing subsample", in report order."""
    return [_fold_label(k, test_index) for test_index in _test_order(k)]


def cross_validate(dataset: ChoiceDataset,
                   domain: DomainFilter = "gain",
                   k: int = 2,
                   seed: int = 0,
                   tying: Tying = "four",
                   weighting_form: WeightingForm = "gw",
                   search_config: Optional[SearchConfig] = None) -> CrossValReport:
    """
    Respondent-level k-fold cross-validation.

    Each part in turn is the testing subsample: parameters are fitted on the
    bold proportions of the remaining respondents and then frozen, and r is
    computed between their challenge indices and the testing subsample's bold
    proportions.

    With k = 2 the folds come out as "A => B" then "B => A" (training =>
    testing subsample); with larger k, fold i tests on part i.
    """
    config = search_config or SearchConfig(seed=seed)
    parts = split_respondents(dataset, k, seed)

    folds = []
    for index, test_index in enumerate(_test_order(k)):
        test_ids = parts[test_index]
        train_ids = [rid for i, part in enumerate(parts) if i != test_index for rid in part]
        train_obs = bold_proportions(dataset.subset(train_ids), domain)
        test_obs = bold_proportions(dataset.subset(test_ids), domain)

        train_fit = fit_params(train_obs, tying, weighting_form, config)
        test_ci = challenge_indices([o.problem for o in test_obs], train_fit.params)
        test_r = pearson_r(test_ci, [o.p_bold for o in test_obs])

        label = _fold_label(k, test_index)
        logger.info("fold %s: train r = %.4f, test r = %.4f", label, train_fit.r, test_r)
        folds.append(CrossValFold(fold=index, label=label, train_ids=train_ids, test_ids=test_ids,
                                  train_fit=train_fit, test_r=test_r))

    names = folds[0].train_fit.params.free_names(tying, weighting_form)
    param_means = {
        name: float(np.mean([fold.train_fit.params.free_values()[j] for fold in folds]))
        for j, name in enumerate(names)
    }
    return CrossValReport(
        domain=domain,
        k=k,
        seed=seed,
        tying=tying,
        weighting_form=weighting_form,
        folds=folds,
        train_r_mean=float(np.mean([fold.train_fit.r for fold in folds])),
        test_r_mean=float(np.mean([fold.test_r for fold in folds])),
        param_means=param_means,
    )

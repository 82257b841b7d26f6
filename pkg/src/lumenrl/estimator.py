"""Scikit-learn style wrapper around the trainer and the inference loop.

`FourierPolicyEnhancer` exposes the whole pipeline through the familiar
fit/transform surface so it composes with sklearn tooling: `fit` runs
actor-critic training on a collection of low-light images, `transform`
enhances images toward the configured brightness target, and
`get_params`/`set_params` come from `BaseEstimator`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import a3c, metrics, nn, rl
from .data import Checkpoint, PairedDataset
from .inference import InferenceConfig, PersonalizationTarget, enhance_adaptive
from .validation import check_image


class FourierPolicyEnhancer(BaseEstimator, TransformerMixin):
    """Low-light enhancer driven by a learned Fourier-amplitude policy.

    Parameters mirror the training and inference configuration; all are
    plain constructor arguments so grid search and cloning work as
    usual. Fitted state lives in `net_`, `checkpoint_` and `history_`.
    """

    def __init__(self, rounds=200, workers=1, seed=0, learning_rate=0.002,
                 gamma=0.95, batch_size=2, steps_per_episode=10,
                 entropy_coeff=0.01, patch_size=64, w_iq=1000.0, w_amp=60.0,
                 zfc_target=0.45, raw_zfc=False, scorer="proxy",
                 epsilon=0.05, max_iterations=20):
        self.rounds = rounds
        self.workers = workers
        self.seed = seed
        self.learning_rate = learning_rate
        self.gamma = gamma
        self.batch_size = batch_size
        self.steps_per_episode = steps_per_episode
        self.entropy_coeff = entropy_coeff
        self.patch_size = patch_size
        self.w_iq = w_iq
        self.w_amp = w_amp
        self.zfc_target = zfc_target
        self.raw_zfc = raw_zfc
        self.scorer = scorer
        self.epsilon = epsilon
        self.max_iterations = max_iterations

    # -- configuration assembly ------------------------------------------

    def _train_config(self) -> a3c.TrainConfig:
        return a3c.TrainConfig(
            learning_rate=self.learning_rate,
            gamma=self.gamma,
            max_rounds=self.rounds,
            batch_size=self.batch_size,
            steps_per_episode=self.steps_per_episode,
            entropy_coeff=self.entropy_coeff,
            workers=self.workers,
            seed=self.seed,
            patch_size=self.patch_size,
        )

    def _reward_weights(self) -> rl.RewardWeights:
        return rl.RewardWeights(
            w_iq=self.w_iq, w_amp=self.w_amp,
            zfc_bar=self.zfc_target, raw_zfc=self.raw_zfc,
        )

    def _inference_config(self, **overrides) -> InferenceConfig:
        kwargs = {"epsilon": self.epsilon, "max_iterations": self.max_iterations}
        kwargs.update(overrides)
        return InferenceConfig(**kwargs)

    # -- sklearn surface ---------------------------------------------------

    def fit(self, X, y=None):
        """Train the policy on low-light images.

        X is a sequence of (H, W, 3) arrays in [0, 1] or a
        PairedDataset (its low images are used). y is ignored.
        """
        images = X.lows if isinstance(X, PairedDataset) else list(X)
        if not images:
            raise ValueError("fit requires at least one image")
        for img in images:
            check_image(img)
        self.history_ = []
        self.checkpoint_ = a3c.train(
            self._train_config(),
            images,
            weights=self._reward_weights(),
            scorer=rl.get_scorer(self.scorer),
            record_hook=self.history_.append,
        )
        self.net_ = nn.PolicyValueNet.from_params(self.checkpoint_.params)
        return self

    def transform(self, X):
        """Enhance each image toward the configured brightness target."""
        self._check_fitted()
        target = PersonalizationTarget(zfc_target=self.zfc_target,
                                       zfc_is_raw=self.raw_zfc)
        return [
            enhance_adaptive(self.net_, img, target, self._inference_config()).output
            for img in X
        ]

    def enhance(self, image, target: PersonalizationTarget | None = None,
                **config_overrides):
        """Full personalized enhancement; returns the EnhanceResult."""
        self._check_fitted()
        if target is None:
            target = PersonalizationTarget(zfc_target=self.zfc_target,
                                           zfc_is_raw=self.raw_zfc)
        return enhance_adaptive(self.net_, image, target,
                                self._inference_config(**config_overrides))

    def score(self, X, y):
        """Mean PSNR (dB) of enhanced X against reference images y."""
        outputs = self.transform(X)
        return float(np.mean([metrics.psnr(out, ref) for out, ref in zip(outputs, y)]))

    # -- checkpointing -------------------------------------------------------

    def load_checkpoint(self, checkpoint: Checkpoint):
        """Adopt previously trained parameters without fitting."""
        self.checkpoint_ = checkpoint
        self.net_ = nn.PolicyValueNet.from_params(checkpoint.params)
        self.history_ = []
        return self

    def _check_fitted(self):
        if not hasattr(self, "net_"):
            raise NotFittedError(
                "this FourierPolicyEnhancer is not fitted; call fit or "
                "load_checkpoint first"
            )

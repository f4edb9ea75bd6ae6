import time
from dataclasses import dataclass

import numpy as np
import pytest

from vqrisk.ansatz import AnsatzSpec
from vqrisk.classify import TrainedModel
from vqrisk.encoding import encode_dataset, generate_synthetic, minmax_normalize, pad_features
from vqrisk.training import OptimizerConfig, cluster_samples, train_cluster, tune_thresholds

DEFAULT_SEED = 42
DEFAULT_COUNT = 40
CLUSTERS_PER_CLASS = 7


@dataclass
class TrainRun:
    spec: AnsatzSpec
    clusters: list
    model: TrainedModel
    elapsed: float

    def tuned_model(self, samples) -> TrainedModel:
        tuned = tune_thresholds(self.clusters, samples, self.spec,
                                distance_mode=self.model.distance_mode)
        return TrainedModel(self.spec, tuple(tuned), self.model.distance_mode)


def train_pipeline(samples, variant, layers, seed=DEFAULT_SEED, lc=CLUSTERS_PER_CLASS):
    """Mirror of the CLI training flow: per-class k-means, per-cluster SPSA."""
    spec = AnsatzSpec(variant, 3, layers)
    config = OptimizerConfig(seed=seed)
    clusters = []
    start = time.perf_counter()
    for class_label in (0, 1):
        class_samples = [s for s in samples if s.label == class_label]
        seed_k = int(np.random.SeedSequence([seed, 17, class_label]).generate_state(1)[0])
        for target in cluster_samples(class_samples, min(lc, len(class_samples)), seed=seed_k):
            clusters.append(train_cluster(spec, target, config))
    elapsed = time.perf_counter() - start
    model = TrainedModel(spec, tuple(clusters), "COST_F")
    return TrainRun(spec, clusters, model, elapsed)


@pytest.fixture(scope="session")
def default_dataset():
    return generate_synthetic(DEFAULT_SEED, DEFAULT_COUNT)


@pytest.fixture(scope="session")
def encoded_train(default_dataset):
    return encode_dataset(pad_features(minmax_normalize(default_dataset), 3))


@pytest.fixture(scope="session")
def run_a1(encoded_train):
    return train_pipeline(encoded_train, "A", 1)


@pytest.fixture(scope="session")
def run_a2(encoded_train):
    return train_pipeline(encoded_train, "A", 2)


@pytest.fixture(scope="session")
def run_b1(encoded_train):
    return train_pipeline(encoded_train, "B", 1)

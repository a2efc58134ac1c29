import numpy as np
import pytest

from voidscope_models.textmodel import (
    SingleClassError,
    TextTrainConfig,
    WhitespaceVocab,
    finetune_text_classifier,
)

SEPARABLE = [
    (f"lizard conspiracy cluster {i}", True) for i in range(10)
] + [
    (f"ordinary weather report {i}", False) for i in range(10)
]


def overfit_config(**overrides):
    # capacity check: crank epochs/lr beyond the production recipe
    defaults = dict(epochs=40, lr=5e-3, batch_size=8, seed=3, eval_fraction=0.0)
    defaults.update(overrides)
    return TextTrainConfig(**defaults)


class TestDefaults:
    def test_production_recipe_values(self):
        config = TextTrainConfig()
        assert config.epochs == 2
        assert config.lr == 2e-5
        assert config.warmup_fraction > 0


class TestTraining:
    def test_overfits_separable_toy_set(self):
        result = finetune_text_classifier(SEPARABLE, overfit_config())
        probs = result.predict_proba([text for text, _ in SEPARABLE])
        predictions = probs[:, 1] >= 0.5
        truth = np.array([label for _, label in SEPARABLE])
        assert np.array_equal(predictions, truth)

    def test_probabilities_sum_to_one(self):
        result = finetune_text_classifier(SEPARABLE, overfit_config(epochs=2))
        probs = result.predict_proba(["lizard conspiracy cluster 3", "unseen words entirely"])
        assert probs.shape == (2, 2)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-6)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassError):
            finetune_text_classifier([("a", True), ("b", True)], overfit_config())

    def test_deterministic_given_seed(self):
        first = finetune_text_classifier(SEPARABLE, overfit_config(epochs=3))
        second = finetune_text_classifier(SEPARABLE, overfit_config(epochs=3))
        probs_a = first.predict_proba(["lizard conspiracy cluster 1"])
        probs_b = second.predict_proba(["lizard conspiracy cluster 1"])
        assert np.allclose(probs_a, probs_b)

    def test_card_fields(self):
        result = finetune_text_classifier(SEPARABLE, overfit_config(epochs=2, eval_fraction=0.2))
        card = result.card
        assert card.variant == "text_only"
        assert card.parameter_count > 0
        assert set(card.metrics) == {"accuracy", "f1", "precision", "recall"}


class TestVocab:
    def test_unknown_tokens_map_to_unk(self):
        vocab = WhitespaceVocab(["alpha beta", "gamma"], max_len=8)
        batch = vocab.encode(["alpha zeta"])
        ids = batch["input_ids"][0].tolist()
        assert ids[0] != WhitespaceVocab.UNK
        assert ids[1] == WhitespaceVocab.UNK

    def test_padding_and_mask(self):
        vocab = WhitespaceVocab(["a b c"], max_len=8)
        batch = vocab.encode(["a b c", "a"])
        assert batch["input_ids"].shape == batch["attention_mask"].shape
        assert batch["attention_mask"][1].sum() == 1

    def test_truncation_at_max_len(self):
        vocab = WhitespaceVocab(["x"], max_len=4)
        batch = vocab.encode(["x x x x x x x x"])
        assert batch["input_ids"].shape[1] == 4

# model_training/train_damage_classifier.py
"""
Train and save an SDAE damage classifier on the synthetic acceptance scene.

Usage:
    python -m model_training.train_damage_classifier
"""
import numpy as np
from sklearn.model_selection import train_test_split

from data_synthesizer import acceptance_scene_spec, generate_scene
from evaluation.metrics import confusion, metrics
from feature_extraction.feature_matrix import build_feature_matrix, majority_classes
from file_processor.raster_processor import compute_ndvi
from model_training.classifiers import make_classifier, save_classifier
from region_merging.rag import merge_regions
from segmentation.fast_scan import adaptive_merge_small, fast_scan_partition
from utils.config import FeatureConfig, TrainConfig
from utils.logging_utils import configure_logging

MODEL_PATH = "damage_model.txt"


def load_training_data(seed: int = 42, scale: float = 0.2):
    """Segment, merge and describe the acceptance scene; classes by truth majority."""
    raster, truth_labels, truth_classes = generate_scene(acceptance_scene_spec(seed=seed))
    feature_cfg = FeatureConfig()
    labels = adaptive_merge_small(fast_scan_partition(raster), raster)
    labels = merge_regions(labels, raster, scale=scale, texture_band=raster.band(feature_cfg.nir_index))
    classes = majority_classes(labels, truth_labels, truth_classes)
    ndvi = compute_ndvi(raster, feature_cfg.nir_index, feature_cfg.red_index)
    return build_feature_matrix(raster, labels, ndvi, classes, feature_cfg.nir_index, feature_cfg.glcm_levels)


def main():
    configure_logging()
    features = load_training_data()
    X, y = features.values, features.require_classes()
    X_train, X_test, y_train, y_test = train_test_split(X, y, test_size=0.3, random_state=42, stratify=y)

    cfg = TrainConfig(learning_rate=0.1, pretrain_epochs=50, finetune_epochs=300, batch_size=8)
    clf = make_classifier("sdae", cfg, hidden_width=50)
    clf.fit(X_train, y_train)

    report = metrics(confusion(clf.predict(X_test), y_test, int(y.max()) + 1), positive_class=1)
    print(f"held-out accuracy {report.accuracy:.3f}, damaged F1 {report.f1:.3f}, kappa {report.kappa:.3f}")
    print("class counts:", np.bincount(y).tolist())

    clf.fit(X, y)
    save_classifier(clf, MODEL_PATH)
    print(f"✅ Model saved to {MODEL_PATH}")


if __name__ == "__main__":
    main()

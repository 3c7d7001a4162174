"""
Utilitários do motor multitarefa: núcleo numérico, modelo, dados, treinamento,
métricas, análise, normalização, validação e relatórios
"""

from .nncore import (
    Batch,
    DenseLayer,
    OptimizerState,
    dense_forward,
    grad_check,
    init_optimizer_state,
    mae_loss,
    optimizer_step,
    sigmoid_bce,
    softmax_xent,
)

from .model import (
    LossBreakdown,
    MultiTaskModel,
    TaskSpec,
    backward_update,
    build_model,
    calibrate_weights_scales,
    combined_loss,
    flop_count,
    forward_all_tasks,
    load_checkpoint,
    save_checkpoint,
)

from .data import (
    FeatureDataset,
    LabelVocabulary,
    SplitAssignment,
    build_dataset,
    build_label_vocab,
    generate_synthetic,
    load_feature_matrix,
    read_metadata,
    resolve_period,
    stem_material_token,
    stratified_split,
    write_feature_matrix,
)

from .engine import (
    TrainConfig,
    TrainLog,
    benchmark_multitask_vs_single,
    evaluate_epoch,
    train,
)

from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    confusion_matrix,
    confusion_offdiagonal,
    interval_accuracy,
    mae_years,
    sample_map,
    topk_accuracy,
)

from .analysis import (
    CooccurrenceTable,
    conditional_probability,
    export_shared_features,
    top_confusions,
)

__all__ = [
    'Batch',
    'DenseLayer',
    'OptimizerState',
    'dense_forward',
    'grad_check',
    'init_optimizer_state',
    'mae_loss',
    'optimizer_step',
    'sigmoid_bce',
    'softmax_xent',
    'LossBreakdown',
    'MultiTaskModel',
    'TaskSpec',
    'backward_update',
    'build_model',
    'calibrate_weights_scales',
    'combined_loss',
    'flop_count',
    'forward_all_tasks',
    'load_checkpoint',
    'save_checkpoint',
    'FeatureDataset',
    'LabelVocabulary',
    'SplitAssignment',
    'build_dataset',
    'build_label_vocab',
    'generate_synthetic',
    'load_feature_matrix',
    'read_metadata',
    'resolve_period',
    'stem_material_token',
    'stratified_split',
    'write_feature_matrix',
    'TrainConfig',
    'TrainLog',
    'benchmark_multitask_vs_single',
    'evaluate_epoch',
    'train',
    'ConfusionMatrix',
    'MetricsReport',
    'confusion_matrix',
    'confusion_offdiagonal',
    'interval_accuracy',
    'mae_years',
    'sample_map',
    'topk_accuracy',
    'CooccurrenceTable',
    'conditional_probability',
    'export_shared_features',
    'top_confusions',
]

from .architectures import (
    build_named,
    cnn_classifier,
    deterministic_forecast_mlp,
    ffnn_classifier,
    markov_forecast_mlp,
    mlp_regressor,
    regression_mlp,
    rnn_classifier,
    scaled_rnn_classifier,
)
from .io import load_model, save_model
from .layers import Conv1D, Dense, Dropout, Flatten, Lstm, MaxPool1D
from .network import Network, NetworkSpec, grad_check, param_count
from .optim import AdamState, adam_step
from .train import (
    TrainConfig,
    TrainedModel,
    TrainingDivergedError,
    evaluate_classification,
    evaluate_regression,
    train,
)

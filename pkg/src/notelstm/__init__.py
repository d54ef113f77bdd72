"""LSTM next-note models trained with cross-entropy, and tools to inspect
how generated melodies change as the loss falls."""

from .analysis import (classify_interval, interval_report, intervals, milestone_report,
                       randomness_metrics)
from .checkpoint import TrainingCheckpoint, load_checkpoint, save_checkpoint
from .errors import (CheckpointError, ChecksumError, DomainError, ParseError,
                     TruncatedCheckpointError, VersionMismatchError)
from .mathcore import batch_loss, cross_entropy, nll, perplexity, softmax
from .model import LstmParameters, ModelConfig, init_parameters, loss_and_gradients
from .optim import AdamHyper, AdamState, adam_step, clip_gradients
from .sampling import Greedy, Stochastic, sample_at_checkpoints, sample_melody
from .synthetic import generate_synthetic_corpus
from .training import LossLog, train
from .vocab import Vocabulary, build_vocabulary, format_note, load_corpus, parse_note

__version__ = "0.1.0"

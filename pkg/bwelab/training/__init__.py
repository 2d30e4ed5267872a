"""Offline behavioral cloning and online PPO finetuning."""
from .bc import BcConfig, TrainingCurve, MseReport, train, evaluate_mse
from .ppo import PpoConfig, RewardCurve, finetune, train_from_scratch, KL_PENALTIES

__all__ = ['BcConfig', 'TrainingCurve', 'MseReport', 'train', 'evaluate_mse',
           'PpoConfig', 'RewardCurve', 'finetune', 'train_from_scratch',
           'KL_PENALTIES']

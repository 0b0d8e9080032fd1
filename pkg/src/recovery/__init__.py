from .operator import RecoveryOperator, apply_recovery, build_recovery, kp_ratio

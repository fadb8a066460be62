# Feedback Domain Kit
# Feedback synthesis from value surfaces, policy evaluation and
# verification diagnostics

from .policy import FeedbackPolicy, synthesize, argmin_controls
from .verification import evaluate_policy, verification_diagnostics

__all__ = ['FeedbackPolicy', 'synthesize', 'argmin_controls', 'evaluate_policy', 'verification_diagnostics']
__version__ = '1.0.0'

from src.rules.base import (
    ATTENTION_RULES,
    BASELINE_LIBRARY,
    RULE_ORDER,
    AttentionConstant,
    PerceivedMenu,
    RuleId,
    parse_library,
)
from src.rules.library import (
    PERCEPTIONS,
    disappointment_severity,
    modal_payoff,
    perceive,
    pw_distort,
    recommendation_side,
    regret_severity,
    salient_state,
)

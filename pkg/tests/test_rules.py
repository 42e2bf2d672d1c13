"""Tests for the perception rules."""

import numpy as np
import pytest

from src.lotteries import Lottery, Menu, fsd_strict, make_act_table, make_lottery
from src.rules import (
    ATTENTION_RULES,
    BASELINE_LIBRARY,
    AttentionConstant,
    RuleId,
    disappointment_severity,
    modal_payoff,
    parse_library,
    perceive,
    pw_distort,
    recommendation_side,
    regret_severity,
    salient_state,
)
from src.utils.errors import ValidationError

EXAMPLE_ONE = make_act_table([1 / 3] * 3, [20, 0, 10], [0, 11, 20])
L3 = make_lottery([3000, 0], [0.9, 0.1])
L4 = make_lottery([6000, 0], [0.45, 0.55])
M = AttentionConstant(6001.0)
SYMMETRIC_RULES = [rule for rule in BASELINE_LIBRARY if rule not in ATTENTION_RULES]
CONTEXT_FREE_SURE_RULES = (RuleId.MMN, RuleId.MMX, RuleId.MAP, RuleId.SAL, RuleId.REG, RuleId.DIS)


def _random_menu(rng: np.random.Generator) -> Menu:
    def draw():
        size = int(rng.integers(1, 4))
        return make_lottery(rng.integers(-50, 51, size=size), rng.dirichlet(np.ones(size)))

    if rng.random() < 0.5:
        return Menu.of_lotteries(draw(), draw())
    states = int(rng.integers(1, 4))
    return Menu.of_acts(
        make_act_table(rng.dirichlet(np.ones(states)), rng.integers(-50, 51, states), rng.integers(-50, 51, states))
    )


class TestRuleIds:
    def test_parse_is_case_insensitive(self):
        assert RuleId.parse("sal") is RuleId.SAL
        assert RuleId.parse(" Map ") is RuleId.MAP
        assert str(RuleId.A1) == "A1"

    def test_unknown_rule(self):
        with pytest.raises(ValidationError, match="unknown rule id"):
            RuleId.parse("LEX")

    def test_library_forces_attention_rules(self):
        assert parse_library(["sal", "MAP"]) == (RuleId.MAP, RuleId.SAL, RuleId.A1, RuleId.A2)
        assert parse_library(["SAL"], force_attention=False) == (RuleId.SAL,)
        assert BASELINE_LIBRARY[0] is RuleId.ID and len(BASELINE_LIBRARY) == 10

    def test_attention_constant(self):
        menus = [Menu.of_lotteries(L3, L4)]

        assert AttentionConstant.from_menus(menus).m_big == 6001.0
        with pytest.raises(ValidationError):
            AttentionConstant(6000.0).check(menus)


class TestStatistics:
    """Modal payoff, probability weighting, salience, regret and disappointment."""

    @pytest.mark.parametrize(
        "lottery, expected",
        [(L3, 3000.0), (L4, 0.0), (make_lottery([0, 100], [0.5, 0.5]), 100.0)],
    )
    def test_modal_payoff(self, lottery, expected):
        assert modal_payoff(lottery) == expected

    def test_pw_keeps_sure_amounts(self):
        assert pw_distort(Lottery.sure(5)) == Lottery.sure(5)

    def test_pw_clamps_rare_outcomes(self):
        distorted = pw_distort(make_lottery([6000, 0], [0.001, 0.999]))

        assert distorted.prizes == (0.0, 6000.0)
        assert distorted.probs == pytest.approx((0.8, 0.2), abs=1e-12)

    def test_pw_keeps_interior_probabilities(self):
        lottery = make_lottery([1, 2], [0.5, 0.5])

        assert pw_distort(lottery) == lottery

    def test_salient_state(self):
        assert salient_state(EXAMPLE_ONE) == 0
        assert salient_state(make_act_table([0.5, 0.5], [1, 2], [1, 2])) == 0
        assert salient_state(make_act_table([0.5, 0.5], [0, 0], [0, 100])) == 1

    def test_regret_severity(self):
        assert regret_severity(EXAMPLE_ONE, 1) == 11.0
        assert regret_severity(EXAMPLE_ONE, 2) == 20.0
        assert regret_severity(make_act_table([0.5, 0.5], [3, 4], [1, 4]), 1) == 0.0

    def test_regret_indifference_on_reflection_menu(self):
        table = Menu.of_lotteries(Lottery.sure(100), make_lottery([200, 0], [0.5, 0.5])).joint

        assert regret_severity(table, 1) == regret_severity(table, 2) == 100.0

    @pytest.mark.parametrize(
        "lottery, expected",
        [
            (Lottery.sure(200), 0.0),
            (make_lottery([300, 0], [0.8, 0.2]), 300 / 301),
            (make_lottery([300, 0], [0.48, 0.52]), 0.0),
        ],
    )
    def test_disappointment_severity(self, lottery, expected):
        assert disappointment_severity(lottery) == pytest.approx(expected, abs=1e-15)


class TestPerceive:
    """Perceived menus of the ten rules."""

    def test_map_on_common_ratio_menu(self):
        perceived = perceive(RuleId.MAP, Menu.of_lotteries(L3, L4), M)

        assert (perceived.perceived_a, perceived.perceived_b) == (Lottery.sure(3000), Lottery.sure(0))
        assert perceived.side() == 1

    def test_identity(self):
        menu = Menu.of_lotteries(L3, L4)
        perceived = perceive("id", menu, M)

        assert (perceived.perceived_a, perceived.perceived_b) == (L3, L4)

    def test_attention_rules(self):
        menu = Menu.of_lotteries(L3, L4)
        first = perceive(RuleId.A1, menu, M)
        second = perceive(RuleId.A2, menu, M)

        assert (first.perceived_a, first.perceived_b) == (L3, Lottery.sure(-6001))
        assert (second.perceived_a, second.perceived_b) == (Lottery.sure(-6001), L4)
        assert first.side() == 1 and second.side() == 2

    def test_regret_on_correlated_example(self):
        perceived = perceive(RuleId.REG, Menu.of_acts(EXAMPLE_ONE), AttentionConstant(21.0))

        assert (perceived.perceived_a, perceived.perceived_b) == (Lottery.sure(-11), Lottery.sure(-20))

    def test_unknown_rule(self):
        with pytest.raises(ValidationError):
            perceive("LEX", Menu.of_lotteries(L3, L4), M)

    def test_properties_on_random_menus(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            menu = _random_menu(rng)
            m = AttentionConstant.from_menus([menu])
            mirrored = menu.swapped()
            for rule in BASELINE_LIBRARY:
                perceived = perceive(rule, menu, m)
                if rule in CONTEXT_FREE_SURE_RULES:
                    assert perceived.perceived_a.is_degenerate and perceived.perceived_b.is_degenerate
                # product-coupled states are re-ordered by a swap, which can move SAL ties
                if rule in SYMMETRIC_RULES and not (rule == RuleId.SAL and menu.form == "marginal"):
                    flipped = perceive(rule, mirrored, m)
                    assert (flipped.perceived_a, flipped.perceived_b) == (
                        perceived.perceived_b,
                        perceived.perceived_a,
                    )
                if rule == RuleId.PW:
                    assert perceived.perceived_a.prizes == menu.marginals[0].prizes
            attend = perceive(RuleId.A1, menu, m)
            assert fsd_strict(attend.perceived_a, attend.perceived_b)
            assert recommendation_side(RuleId.A2, menu, m) == 2
            assert recommendation_side(RuleId.A1, mirrored, m) == 1

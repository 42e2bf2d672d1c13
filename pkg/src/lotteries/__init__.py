from src.lotteries.coupling import (
    acts_to_lotteries,
    comonotone_coupling,
    countermonotone_coupling,
    product_coupling,
)
from src.lotteries.dominance import contrast, fsd_strict, fsd_weak
from src.lotteries.lottery import ActTable, Lottery, make_act_table, make_lottery
from src.lotteries.menu import JOINT_FORM, MARGINAL_FORM, Menu

"""
公共工具：日志、异常、运行配置

功能：
1. Logger：统一的日志输出格式 ([INFO] / [ERROR] ...)，输出到 stderr，
   保证 --json 报告独占 stdout
2. 异常层次：库函数只抛异常，退出码由 cli 决定
3. 默认参数与环境变量覆盖 (NEWTON_MOTIVIC_BUDGET, NEWTON_MOTIVIC_DEBUG)
"""

import os
import sys

# === 默认配置 ===
DEFAULT_PRIMES = (2, 3, 5, 7, 11)
DEFAULT_PROBE_PRIMES = (3, 5, 7)
DEFAULT_SAMPLE_BOUND = 12
DEFAULT_SERIES_DEPTH = 12
DEFAULT_BUDGET = 10 ** 8
DECOMPOSITION_CAP = 10 ** 4

BUDGET_ENV = "NEWTON_MOTIVIC_BUDGET"
DEBUG_ENV = "NEWTON_MOTIVIC_DEBUG"


class Logger:
    """
    简单的日志工具，用于统一输出格式
    """
    @staticmethod
    def info(msg):
        print(f"[INFO] {msg}", file=sys.stderr)

    @staticmethod
    def error(msg):
        print(f"[ERROR] {msg}", file=sys.stderr)

    @staticmethod
    def debug(msg):
        # 由环境变量控制是否显示调试信息
        if os.environ.get(DEBUG_ENV, "") not in ("", "0"):
            print(f"[DEBUG] {msg}", file=sys.stderr)

    @staticmethod
    def success(msg):
        print(f"[SUCCESS] {msg}", file=sys.stderr)

    @staticmethod
    def warning(msg):
        print(f"[WARNING] {msg}", file=sys.stderr)


def resolve_budget(explicit=None):
    """
    枚举预算：显式参数 > 环境变量 > 默认值
    """
    if explicit is not None:
        return int(explicit)
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            Logger.warning(f"{BUDGET_ENV}={raw!r} 不是整数，使用默认预算 {DEFAULT_BUDGET}")
    return DEFAULT_BUDGET


def check_budget(size, budget, what):
    """枚举规模超出预算时抛 BudgetExceeded (不做静默截断)"""
    if size > budget:
        raise BudgetExceeded(what, size, budget)
    Logger.debug(f"{what}: 枚举规模 {size} / 预算 {budget}")


# === 异常定义 ===

class NewtonMotivicError(Exception):
    """所有库异常的基类"""


class ProblemSyntaxError(NewtonMotivicError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class HypothesisError(NewtonMotivicError):
    """假设不满足：reason 为名字 (balance / g0 / nondegenerate / block2 ...)，witness 为反例"""

    def __init__(self, reason, message, witness=None):
        self.reason = reason
        self.witness = witness
        super().__init__(f"[{reason}] {message}")


class FaceMismatchError(NewtonMotivicError):
    pass


class PartitionError(NewtonMotivicError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)


class DecompositionError(NewtonMotivicError):
    def __init__(self, message, cone=None):
        self.cone = cone
        super().__init__(message)


class PositivityError(NewtonMotivicError):
    def __init__(self, message, generator=None):
        self.generator = generator
        super().__init__(message)


class BudgetExceeded(NewtonMotivicError):
    def __init__(self, what, size, budget):
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: enumeration size {size} exceeds budget {budget}")


class BaseTagError(NewtonMotivicError):
    pass


class ConsistencyError(NewtonMotivicError):
    """内部交叉校验失败 (极限与闭式不符等)，说明实现有 bug"""


class ReductionError(NewtonMotivicError):
    """系数分母被 q 整除，无法约化到 F_q"""

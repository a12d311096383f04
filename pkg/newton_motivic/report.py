"""
问题文件与报告的数据模型 (pydantic)

问题文件 (JSON)：
{
  "dims": [d1, d2, d3]            # 或 [n1, n2]
  "terms": [{"exp": [...], "coef": "1"}, [[...], "-1/2"], ...],
  "h_terms": [...],               # 可选：与 options.N 一起构造 F = g + h^N
  "options": {"q_list": [...], "bound": 12, "depth": 12, "N": 3, "budget": ...}
}
"""

import json
from fractions import Fraction
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .utils import ProblemSyntaxError


class TermSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    exp: list[int]
    coef: str = "1"

    @model_validator(mode="before")
    @classmethod
    def _accept_pair(cls, data):
        # 简写形式 [exp, coef]
        if isinstance(data, (list, tuple)) and len(data) == 2:
            return {"exp": data[0], "coef": str(data[1])}
        return data

    @field_validator("coef", mode="before")
    @classmethod
    def _coef_as_text(cls, value):
        if isinstance(value, (int, Fraction)):
            return str(value)
        return value

    @field_validator("coef")
    @classmethod
    def _coef_is_rational(cls, value):
        try:
            Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"coefficient {value!r} is not a rational number") from exc
        return value

    @field_validator("exp")
    @classmethod
    def _exp_nonnegative(cls, value):
        if any(e < 0 for e in value):
            raise ValueError(f"negative exponent in {value}")
        return value


class ProblemOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    q_list: Optional[list[int]] = None
    bound: Optional[int] = None
    depth: Optional[int] = None
    N: Optional[int] = Field(default=None, ge=1)
    budget: Optional[int] = None


class ProblemFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dims: list[int]
    terms: list[TermSpec]
    h_terms: Optional[list[TermSpec]] = None
    options: ProblemOptions = Field(default_factory=ProblemOptions)

    @field_validator("dims")
    @classmethod
    def _dims_shape(cls, value):
        if len(value) not in (2, 3) or any(d < 0 for d in value) or sum(value) == 0:
            raise ValueError("dims must be [n1, n2] or [d1, d2, d3] with nonnegative entries")
        return value

    @model_validator(mode="after")
    def _exponent_lengths(self):
        n = sum(self.dims)
        for term in self.terms:
            if len(term.exp) != n:
                raise ValueError(f"exponent {term.exp} has length {len(term.exp)}, dims say {n}")
        if self.h_terms is not None:
            if len(self.dims) != 3:
                raise ValueError("h_terms need a three-block partition")
            if self.options.N is None:
                raise ValueError("h_terms given without options.N")
            for term in self.h_terms:
                if len(term.exp) != self.dims[2]:
                    raise ValueError(f"h exponent {term.exp} must have length d3={self.dims[2]}")
        return self

    @property
    def partition(self):
        dims = list(self.dims) + [0] * (3 - len(self.dims))
        return tuple(dims)


class ConeSpec(BaseModel):
    """oracle series 使用的锥描述文件"""
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=1)
    generators: Optional[list[list[int]]] = None
    open: bool = True
    inequalities: Optional[list[list[int]]] = None
    strict: Optional[list[bool]] = None
    equalities: Optional[list[list[int]]] = None
    l: list[int]
    l_prime: list[int]

    @model_validator(mode="after")
    def _one_description(self):
        if (self.generators is None) == (self.inequalities is None):
            raise ValueError("give exactly one of generators / inequalities")
        if self.inequalities is not None and self.strict is not None \
                and len(self.strict) != len(self.inequalities):
            raise ValueError("strict flags must match inequalities")
        for vec in (self.generators or []) + (self.inequalities or []) + (self.equalities or []) \
                + [self.l, self.l_prime]:
            if len(vec) != self.dim:
                raise ValueError(f"vector {vec} does not have length {self.dim}")
        return self


class Report(BaseModel):
    command: str
    source: Optional[str] = None
    hypotheses: dict[str, str] = Field(default_factory=dict)
    result: dict[str, Any] = Field(default_factory=dict)
    oracle: dict[str, Any] = Field(default_factory=dict)
    diagnostics: list[str] = Field(default_factory=list)
    exit_code: int = 0

    def to_json(self):
        # 键排序，保证两次运行字节一致
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True, ensure_ascii=False)

    def to_text(self):
        # 与 to_json 同源：先转成 JSON 数据再渲染
        data = json.loads(self.to_json())
        lines = ["=" * 60, f"newton-motivic {self.command}", "=" * 60]
        if self.source:
            lines.append(f"input: {self.source}")
        if self.hypotheses:
            lines.append("--- hypotheses ---")
            for key in sorted(self.hypotheses):
                lines.append(f"  {key}: {self.hypotheses[key]}")
        lines.append("--- result ---")
        lines.extend(_render(data["result"], 1))
        if data["oracle"]:
            lines.append("--- oracle ---")
            lines.extend(_render(data["oracle"], 1))
        if self.diagnostics:
            lines.append("--- diagnostics ---")
            lines.extend(f"  - {d}" for d in self.diagnostics)
        lines.append(f"exit code: {self.exit_code}")
        return "\n".join(lines)


def _render(value, depth):
    pad = "  " * depth
    if isinstance(value, dict):
        out = []
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list)) and item:
                out.append(f"{pad}{key}:")
                out.extend(_render(item, depth + 1))
            else:
                out.append(f"{pad}{key}: {json.dumps(item, ensure_ascii=False)}")
        return out
    if isinstance(value, list):
        out = []
        for item in value:
            if isinstance(item, dict):
                out.append(f"{pad}-")
                out.extend(_render(item, depth + 1))
            else:
                out.append(f"{pad}- {json.dumps(item, ensure_ascii=False)}")
        return out
    return [f"{pad}{json.dumps(value, ensure_ascii=False)}"]


def parse_model(model, text):
    """JSON 文本 -> pydantic 模型；语法与校验错误统一转成 ProblemSyntaxError"""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise ProblemSyntaxError(f"{where}: {first.get('msg')}") from exc

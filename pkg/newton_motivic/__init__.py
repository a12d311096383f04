"""
newton_motivic：Newton 多面体、标准扇与非退化多项式的 motivic Milnor 纤维

模块：
  poly_core     稀疏多项式、问题文件
  polyhedra     Newton 多面体、对偶锥、标准剖分、扇检查
  cones_series  锥的格点级数与 T -> ∞ 极限
  motivic_ring  Grothendieck 环中的类、ζ 函数与 Milnor 纤维公式
  oracles       有限域暴力枚举对照
  cli           命令行入口 (python -m newton_motivic)
"""

__version__ = "0.1.0"

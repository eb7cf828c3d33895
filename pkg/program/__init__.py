"""
程序模块 - .lkt 模型描述语言的解析、求值与命令执行
"""

from .lkt_parser import LktError, LktParser, Program, parse, parse_file, serialize
from .model_context import ModelContext, load_context, merge_programs
from .program_executor import Outcome, ProgramExecutor, load_beta_fixture

__version__ = "1.0.0"

__all__ = [
    'LktError',
    'LktParser',
    'Program',
    'parse',
    'parse_file',
    'serialize',
    'ModelContext',
    'load_context',
    'merge_programs',
    'Outcome',
    'ProgramExecutor',
    'load_beta_fixture',
]

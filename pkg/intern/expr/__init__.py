from .jet import (
    Jet2, JetDomainError, SingularJetError,
    stack, concatenate, matmul, outer, solve, compose,
)
from .parser import (
    Expression, ExpressionError, ExprSyntaxError, UnknownIdentifierError, ExprDomainError,
    Num, Sym, Const, Neg, BinOp, Call, FUNCTIONS,
    parse, evaluate_jet2, to_source, rebind,
)

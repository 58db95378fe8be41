"""Exception hierarchy shared across the simulator.

Three broad families map onto the CLI exit codes: configuration problems
(exit 1), bad or missing input data (exit 2), and everything else (exit 3).
"""


class TarsimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(TarsimError):
    """A configuration file or parameter combination is invalid."""


class DataError(TarsimError):
    """Input data is missing or malformed."""


# -- corpus ------------------------------------------------------------

class MissingFile(DataError):
    pass


class MalformedRecord(DataError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


class DuplicateId(DataError):
    def __init__(self, doc_id: str):
        super().__init__(f"duplicate document id {doc_id!r}")
        self.doc_id = doc_id


class EmptyCorpus(DataError):
    pass


class EmptyKeywordList(DataError):
    pass


# -- featurize ---------------------------------------------------------

class NoTokens(DataError):
    """Corpus tokenizes to nothing; no vocabulary can be built."""


# -- model -------------------------------------------------------------

class DegenerateTraining(TarsimError):
    """Training set contains a single class; caller must fall back."""


class NonFiniteLoss(TarsimError):
    """Training diverged; the learning rate is too large."""


class DimensionMismatch(TarsimError):
    pass


# -- seeding -----------------------------------------------------------

class NoKeywordHits(DataError):
    """Every keyword hit set is empty; keyword seeding is impossible."""


# -- active_selection --------------------------------------------------

class EmptyPool(TarsimError):
    pass


class InsufficientPositives(TarsimError):
    """The scored pool holds fewer positives than the recall target needs."""


class NoPositivesInControl(TarsimError):
    pass


# -- metrics -----------------------------------------------------------

class TargetUnreachable(TarsimError):
    """Training plus scored positives cannot reach the recall target."""


class MissingRound(TarsimError):
    def __init__(self, round_index: int, trace_id: str = ""):
        detail = f" in trace {trace_id}" if trace_id else ""
        super().__init__(f"round {round_index} not present{detail}")
        self.round_index = round_index


# -- harness -----------------------------------------------------------

class ConfigInconsistent(ConfigError):
    pass


class IoFailure(TarsimError):
    pass

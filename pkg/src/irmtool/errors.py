"""Exception types shared across the pipeline."""


class IrmError(Exception):
    """Base class for all pipeline errors."""


def _request_id(request):
    if isinstance(request, str):
        return request
    if isinstance(request, dict):
        return request.get("request_id", str(request))
    return getattr(request, "request_id", str(request))


class MalformedConllu(IrmError):
    """A CoNLL-U line violates the ten-column contract."""

    def __init__(self, line_no, message=""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if message else f"line {line_no}")


class CyclicParse(IrmError):
    """HEAD links of a sentence form a cycle."""

    def __init__(self, sentence_id):
        self.sentence_id = sentence_id
        super().__init__(f"sentence {sentence_id!r} has cyclic HEAD links")


class UnparsableSentence(IrmError):
    """The shallow parser found no analysable main verb."""

    def __init__(self, text):
        self.text = text
        super().__init__(f"no parse for: {text[:60]!r}")


class MissingSection(IrmError):
    """The document has no recognizable section headings."""


class UnknownWord(IrmError):
    """A lemma is absent from the synset graph (callers usually abstain instead)."""


class UnresolvedDecision(IrmError):
    """A blocking human decision has not been journaled yet."""

    def __init__(self, requests):
        self.requests = list(requests)
        ids = ", ".join(_request_id(r) for r in self.requests[:5])
        more = "" if len(self.requests) <= 5 else f" (+{len(self.requests) - 5} more)"
        super().__init__(f"unresolved decisions: {ids}{more}")


class UnresolvedProposal(IrmError):
    """A needed refinement proposal was rejected without a manual replacement."""


class NoOutputOwner(IrmError):
    """Refinement cannot pick a computing component: outputs span several."""


class DanglingInvariant(IrmError):
    """An invariant is neither a root requirement nor reachable from one."""


class SchemaViolation(IrmError):
    """A serialized model violates the document schema."""

    def __init__(self, path, message=""):
        self.path = path
        super().__init__(f"{path}: {message}" if message else str(path))


class ConfigurationExplosion(IrmError):
    """OR combinatorics exceed the enumeration cap."""

    def __init__(self, total, cap):
        self.total = total
        self.cap = cap
        super().__init__(f"{total} configurations exceed the cap of {cap}")


class RevisionConflict(IrmError):
    """A decision was submitted against a stale revision."""

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected revision {expected}, session is at {actual}")


class UnknownDecision(IrmError):
    """Decision id does not match any open request."""


class StateLocked(IrmError):
    """Another process holds the advisory lock on the state directory."""

"""Exception hierarchy for the tercode package."""


class TercodeError(Exception):
    """Base class for all tercode errors."""


class ParseError(TercodeError):
    """Base class for test-set file format errors."""


class EmptyInput(ParseError):
    """The test-set input contains no patterns."""


class RaggedRows(ParseError):
    """Test-set rows have differing lengths."""


class IllegalCharacter(ParseError):
    """A character outside the {0,1,X,x} alphabet was found."""


class CodecError(TercodeError):
    """Base class for covering/coding errors."""


class LengthMismatch(CodecError):
    """A matching vector and an input block differ in length."""


class UnmatchedBlock(CodecError):
    """No matching vector matches an input block; the MV set is infeasible.

    ``block_index`` is the 1-based ordinal of the first unmatched block.
    """

    def __init__(self, block_index: int):
        super().__init__(f"no matching vector matches input block {block_index}")
        self.block_index = block_index


class AllZeroFrequencies(CodecError):
    """Every matching vector has frequency zero; there is nothing to code."""


class NoCodeword(CodecError):
    """A matching vector has no codebook entry."""


class NotMatching(CodecError):
    """Attempted to encode a block with a vector that does not match it."""


class TruncatedPayload(CodecError):
    """The payload ended in the middle of a codeword or its fill bits."""


class DanglingBits(CodecError):
    """The payload holds more bits than the declared block count decodes."""


class UnknownCodeword(CodecError):
    """A payload prefix matches no codeword in the codebook."""


class ZeroOriginal(CodecError):
    """Compression rate is undefined for an empty original test set."""


class OddK(CodecError):
    """The nine-vector scheme requires an even block length."""


class ContainerError(TercodeError):
    """Base class for container (de)serialization errors."""


class BadMagic(ContainerError):
    """The container does not start with the expected magic bytes."""


class UnsupportedVersion(ContainerError):
    """The container declares a format version this reader cannot handle."""


class CorruptHeader(ContainerError):
    """The container is truncated or structurally malformed."""


class ChecksumMismatch(ContainerError):
    """The container checksum does not match its contents."""


class InvalidConfig(TercodeError):
    """An evolutionary-search or CLI configuration value is out of range."""

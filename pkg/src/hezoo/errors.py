"""Exception hierarchy shared by every scheme."""


class HEError(Exception):
    """Base class; ``code`` is the stable machine-readable name used by the CLI."""

    code = "HEError"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


def _make(name: str, doc: str) -> type:
    return type(name, (HEError,), {"code": name, "__doc__": doc})


ParameterError = _make("ParameterError", "Parameters violate a documented constraint.")
UnsupportedOp = _make("UnsupportedOp", "The scheme does not support the requested evaluation.")
BudgetExceeded = _make("BudgetExceeded", "Multiplication budget would be exceeded.")
GammaExceeded = _make("GammaExceeded", "Ciphertext multiplication counter exceeds the key's limit.")
EncryptionBudgetExceeded = _make("EncryptionBudgetExceeded", "More encryptions than the key allows.")
SchemeMismatch = _make("SchemeMismatch", "Envelopes or keys belong to different schemes.")
Corrupt = _make("Corrupt", "Serialized bytes are truncated or malformed.")
VersionMismatch = _make("VersionMismatch", "Serialized bytes carry an unknown format version.")
Inconsistent = _make("Inconsistent", "Linear system has no solution.")
AmbiguousAtY = _make("AmbiguousAtY", "Interpolated value at the message support is not determined.")
DecodeAmbiguous = _make("DecodeAmbiguous", "Majority vote tied during Reed decoding.")
NotInCode = _make("NotInCode", "Word is not a codeword.")
NoAnnihilator = _make("NoAnnihilator", "Decryption system has no solution.")
RetriesExhausted = _make("RetriesExhausted", "Rejection sampling hit its retry bound.")
NoParamsFound = _make("NoParamsFound", "Parameter search found nothing within its bounds.")
LevelMismatch = _make("LevelMismatch", "Ciphertexts sit at different modulus levels.")
LevelExhausted = _make("LevelExhausted", "No lower modulus level is available.")

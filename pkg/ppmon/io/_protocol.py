"""The current protocol of the ppmon persistence format

Every backwards incompatible change to the format bumps the protocol. Files
written with a higher protocol than the running one are refused with
:class:`~ppmon.io.exceptions.ModelVersionError`; nodes whose loader did not
change between protocols are looked up under the current protocol.
"""
PROTOCOL = 1

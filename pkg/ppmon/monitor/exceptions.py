class MessageError(ValueError):
    """An inbound stream message that cannot be processed.

    The message is answered with an error line; the stream goes on.
    """

class ExceptionBase(Exception):
    pass


class ConfigError(ExceptionBase):
    pass


class UsageError(ExceptionBase):
    pass


class FileError(ExceptionBase):
    pass


class HDF5FileError(FileError):
    pass


class MatrixFileError(FileError):
    pass


class DimensionError(ExceptionBase, ValueError):
    pass


class KeyLengthError(ExceptionBase, ValueError):
    pass


class RoundError(ExceptionBase, ValueError):
    pass


class WindowError(ExceptionBase, ValueError):
    pass


class StatisticsError(ExceptionBase, ValueError):
    pass


class SubprocessError(ExceptionBase):
    pass


def addmessage(args, errormsg):
    if not args:
        arg0 = ''
    else:
        arg0 = args[0]
    arg0 += errormsg
    return (arg0, )

import os

__version__ = '0.1.0'


# for scripted usage
def run(args):
    '''Parameters
        args: string
            String as if typed in terminal. The string must consist
            of the location of the configuration file and the command,
            'census ARM' or 'distinguish [REPORT]'.
            All additional configuration file overrides can be included

        Returns
        A list of rank censuses for 'census', a verdict report for 'distinguish'

        Examples:
        >>> report = aesrank.run('experiment.txt -c experiment:window_size=16 distinguish')
        >>> report.distinguished
        False
        >>> aesrank.run('experiment.txt census plain')
        [RankCensus(plain #0, 512 windows, {4690: 512})]
    '''

    import aesrank.main
    main = aesrank.main.Main.from_args(args.split())
    if main.report is not None:
        return main.report
    return main.result


def load(filename):
    ''' Parameters
        filename: string
            a census file, '.json', '.csv' or '.hdf5'

        Returns
        A list of rank censuses

        Examples:
        >>> aesrank.load('census_aes_0.json')
        [RankCensus(aes #0, 512 windows, {31745: ..., 31744: ..., 31743: ..., 31742: ...})]
    '''
    import aesrank.census
    if os.path.exists(filename):
        return aesrank.census.load(filename)
    else:
        raise IOError("File '{0}' does not exist".format(filename))


def save(filename, censuses):
    '''
        Save rank censuses to file

        Parameters
        filename: string
            filename to which the data is saved. '.json', '.csv' and '.hdf5' are supported.
        censuses: a RankCensus or a list of them

        Examples:
        >>> censuses = aesrank.load('census_aes_0.json')
        >>> aesrank.save('census_aes_0.hdf5', censuses)
    '''

    import aesrank.census
    if isinstance(censuses, aesrank.census.RankCensus):
        censuses = [censuses]
    censuses = list(censuses)
    if not all(isinstance(c, aesrank.census.RankCensus) for c in censuses):
        raise TypeError("'{0!r}' is not a list of rank censuses".format(censuses))
    aesrank.census.save(censuses, filename)


def info(filename):
    '''
        Describe a census file, or a list of censuses, and the configuration that produced it

        Parameters
        filename: filename or list of censuses

        Examples:
        >>> print(aesrank.info('census_aes_0.hdf5'))
        RankCensus(aes #0, 512 windows, {31745: ..., 31744: ..., 31743: ..., 31742: ...})
        ConfigFile{
          [dispatcher]
          [experiment]
            tau = 1
        }
        origin = command line
        command = aesrank,census,--windows,512
    '''

    import aesrank.census
    ret = ''
    if isinstance(filename, (list, tuple)):
        censuses = list(filename)
    elif isinstance(filename, str):
        if not os.path.exists(filename):
            raise IOError("File '{0}' does not exist".format(filename))
        try:
            censuses = aesrank.census.load(filename)
        except Exception as e:
            raise IOError('{0}: unable to load census: {1!r}'.format(filename, e))
    else:
        raise TypeError("'{0!r}' is neither a filename nor a list of censuses".format(filename))
    for census in censuses:
        ret += '{!r}\n'.format(census)
    if censuses:
        ret += '{!r}'.format(censuses[0].config)
    return ret

import os

from setuptools import setup

packages = ["aesrank"]

scripts = [os.path.join("scripts", d)
           for d in ["aesrank"]]

setup(name='aesrank', version='0.1.0',
      description='Rank-based distinguisher of AES encryption samples',
      long_description=open('README.md').read(),
      long_description_content_type='text/markdown',
      packages=packages,
      scripts=scripts,
      install_requires=['numpy', 'scipy', 'h5py'],
      python_requires='>=3.6',
      license='GPL-3',
      classifiers=[
          'Topic :: Scientific/Engineering',
          'Topic :: Security :: Cryptography',
          'Development Status :: 3 - Alpha',
          'Operating System :: POSIX',
          'Operating System :: Unix',
          'Programming Language :: Python :: 3']
      )

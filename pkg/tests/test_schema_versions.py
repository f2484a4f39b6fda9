# Copyright 2026 prooforge contributors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Tests for the default versions of each json document."""
import glob
import logging
import os
import unittest

from packaging.version import parse

from prooforge import BASE_PATH
from prooforge.bench import RECORD_VERSION, BenchReport
from prooforge.proofs.aprp import AprpGraph

DOCUMENTS = {"AprpGraph": AprpGraph.version, "BenchRecord": RECORD_VERSION}


class TestSchemaVersions(unittest.TestCase):
    """Test the default versions of documents."""

    logger = logging.getLogger(__name__)

    def test_schemas_load(self):
        """Test that the default schema of each document loads."""
        self.assertIsNotNone(AprpGraph("loading").schema)
        self.assertIsNotNone(BenchReport().schema)

    def _latest_schema(self, base_path):
        """Find the latest schema file in path.

        :param base_path: The base path of the document schemas.
        :type base_path: str
        :return: The latest version found in path.
        :rtype: :obj:`packaging.version.Version`
        """
        latest = None
        for path in glob.glob("%s/*.json" % base_path):
            version = parse(os.path.basename(path).replace(".json", ""))
            if latest is None or version > latest:
                latest = version
        return latest

    def test_latest_version(self):
        """Test that all documents use the latest version of schemas (in repo).

        Approval criteria:
            - All documents shall, by default, use the latest version of local schemas.

        Test steps:
            1. For each document:
                1.1: Get the default version of the document
                1.2: Verify that the default version is the latest, local, schema.
        """
        self.logger.info("STEP: For each document:")
        for name, version in DOCUMENTS.items():
            self.logger.info("STEP: Get the default version of the document %r", name)
            default_version = parse(version)

            self.logger.info("STEP: Verify that the default version is the latest, local, schema.")
            latest = self._latest_schema(os.path.join(BASE_PATH, "schemas", name))
            self.assertEqual(default_version, latest,
                             "The default version %r is not the latest %r for document %r"
                             % (default_version, latest, name))

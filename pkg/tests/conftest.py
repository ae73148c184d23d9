import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import tercode

# keep pytest from collecting the TestSet dataclass as a test class
tercode.TestSet.__test__ = False
tercode.core.TestSet.__test__ = False

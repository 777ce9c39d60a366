import json
import os
import tempfile
import unittest

import completeness as cp


class SmokeTest(unittest.TestCase):
    def test_version(self):
        self.assertEqual(cp.__version__, "0.1.0")

    def test_sequences_roundtrip_and_evaluate(self):
        data = cp.gen_sequences(generator="rv", param1=0.2, param2=0.7,
                                n_strings=2000, seed=3)
        self.assertEqual(len(data), 2000)
        self.assertEqual(data.domain, "sequences")

        csv = cp.to_csv(data)
        back = cp.parse_csv(csv, "sequences")
        self.assertEqual(cp.to_csv(back), csv)

        report = cp.evaluate(data, domain="sequences", models=["rv"],
                             seed=1, grid_points=5)
        machine = report["machine"]
        self.assertEqual(machine["version"], "0.1.0")
        self.assertEqual(machine["models"][0]["name"], "rabin_vayanos")
        self.assertAlmostEqual(machine["naive"]["mean_error"], 0.25, places=6)
        self.assertGreater(machine["models"][0]["completeness"], 0.0)
        self.assertIn("table_lookup", report["text"])

    def test_csv_file_io(self):
        data = cp.gen_risk(n_subjects=5, seed=2)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "risk.csv")
            cp.save_csv(data, path)
            back = cp.load_csv(path, "risk")
            self.assertEqual(len(back), len(data))

    def test_schema_error(self):
        with self.assertRaises(RuntimeError):
            cp.parse_csv("bad,header\n1,2\n", "risk")

    def test_filter_subjects(self):
        data = cp.gen_sequences(n_strings=100, seed=4)
        out = cp.filter_subjects(data, method="first_k", param=10)
        self.assertLess(len(out["data"]), len(data))
        self.assertIn("subjects_dropped", out["audit"]["machine"])

    def test_helpers(self):
        self.assertEqual(cp.round_percent(0.345), 35)
        self.assertAlmostEqual(cp.chi_squared_pvalue(4.605, 2.0), 0.10,
                               places=3)

    def test_report_is_json(self):
        data = cp.gen_games(n_games=10, observations_per_game=20, seed=5)
        report = cp.evaluate(data, domain="games", loss="miscls", seed=2)
        json.dumps(report["machine"])  # plain JSON-serializable types only


if __name__ == "__main__":
    unittest.main()

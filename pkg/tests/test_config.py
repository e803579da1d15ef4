import unittest
import json
import os
import tempfile
from unittest import mock

from lichlab import config as config_module
from lichlab.config import (
    DEFAULT_CONFIG, RunConfig, get_config, load_config_file, merge_config, parse_args, suite_seed
)
from lichlab.errors import ConfigParse, EmptySweep, UnknownAxis

PARAMS = {"n": 4, "mu": 0.0, "a": 1.0, "b": 0.0, "p": 2.0, "q": 1.0}


class TestConfig(unittest.TestCase):
    def setUp(self):
        # Create a temporary directory for test files
        self.test_dir = tempfile.TemporaryDirectory()
        self.original_cwd = os.getcwd()
        os.chdir(self.test_dir.name)
        # Keep user and system config files out of the tests
        self.paths = mock.patch.object(config_module, 'DEFAULT_CONFIG_PATHS', ['lichlab.json'])
        self.paths.start()

    def tearDown(self):
        # Clean up
        self.paths.stop()
        os.chdir(self.original_cwd)
        self.test_dir.cleanup()

    def write(self, data, name='lichlab.json'):
        with open(name, 'w') as f:
            json.dump(data, f)
        return name

    def test_default_config(self):
        """No config file anywhere gives the defaults"""
        self.assertEqual(load_config_file(), {})
        config = get_config(parse_args([]))
        self.assertEqual(config, DEFAULT_CONFIG)

    def test_current_directory_file(self):
        self.write({"command": "classify", "params": PARAMS})
        config = get_config(parse_args([]))
        self.assertEqual(config['command'], 'classify')
        self.assertEqual(config['params'], PARAMS)
        self.assertEqual(config['solver']['tol'], DEFAULT_CONFIG['solver']['tol'])

    def test_explicit_path_must_exist(self):
        with self.assertRaises(ConfigParse):
            load_config_file('missing.json')

    def test_invalid_json(self):
        with open('broken.json', 'w') as f:
            f.write('{"command": ')
        with self.assertRaises(ConfigParse):
            load_config_file('broken.json')
        self.write([1, 2, 3], 'list.json')
        with self.assertRaises(ConfigParse):
            load_config_file('list.json')

    def test_merge_rejects_unknown_keys(self):
        with self.assertRaises(ConfigParse):
            merge_config(DEFAULT_CONFIG, {"server": {}})
        with self.assertRaises(ConfigParse):
            merge_config(DEFAULT_CONFIG, {"solver": {"rtol": 1e-6}})
        with self.assertRaises(ConfigParse):
            merge_config(DEFAULT_CONFIG, {"params": dict(PARAMS, sigma=1.0)})
        with self.assertRaises(ConfigParse):
            merge_config(DEFAULT_CONFIG, {"solver": 3})

    def test_merge_is_deep(self):
        merged = merge_config(DEFAULT_CONFIG, {"solver": {"v0": 2.0}})
        self.assertEqual(merged['solver']['v0'], 2.0)
        self.assertEqual(merged['solver']['grid_points'], 2001)
        self.assertEqual(DEFAULT_CONFIG['solver']['v0'], 1.0)

    def test_command_line_overrides(self):
        path = self.write({"command": "classify", "params": PARAMS}, 'run.json')
        args = parse_args(['-c', path, '--command', 'sweep', '-j', '3', '-o', 'elsewhere', '-f', 'csv',
                           '--axis', 'p', '--values', '0.5, 1.0,1.5'])
        config = get_config(args)
        self.assertEqual(config['command'], 'sweep')
        self.assertEqual(config['sweep'], {"axis": "p", "values": [0.5, 1.0, 1.5], "jobs": 3})
        self.assertEqual(config['output'], {"dir": "elsewhere", "formats": ["csv"]})
        with self.assertRaises(ConfigParse):
            get_config(parse_args(['--values', '1,x']))

    def test_log_level_precedence(self):
        self.write({"logging": {"level": "WARNING"}})
        self.assertEqual(get_config(parse_args([]))['logging']['level'], 'WARNING')
        self.assertEqual(get_config(parse_args(['-v']))['logging']['level'], 'DEBUG')
        self.assertEqual(get_config(parse_args(['-v', '-l', 'ERROR']))['logging']['level'], 'ERROR')

    def test_suite_seed(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(suite_seed(), 42)
        with mock.patch.dict(os.environ, {'LICHLAB_SEED': '9'}):
            self.assertEqual(suite_seed(), 9)
        with mock.patch.dict(os.environ, {'LICHLAB_SEED': 'nine'}):
            with self.assertRaises(ConfigParse):
                suite_seed()


class TestRunConfig(unittest.TestCase):
    def build(self, **sections):
        config = merge_config(DEFAULT_CONFIG, dict({"command": "solve", "params": PARAMS}, **sections))
        return RunConfig.from_dict(config)

    def test_defaults(self):
        run = self.build()
        self.assertEqual(run.params.R, 1.0)
        self.assertEqual(run.R_max, 1.0)
        self.assertEqual(run.manifold.n, 4)
        self.assertEqual(run.manifold.kappa, 0.0)
        self.assertEqual(run.formats, ('csv', 'json'))
        self.assertFalse(run.nominal)
        self.assertGreaterEqual(run.jobs, 1)

    def test_required_sections(self):
        with self.assertRaises(ConfigParse):
            RunConfig.from_dict(merge_config(DEFAULT_CONFIG, {"params": PARAMS}))
        with self.assertRaises(ConfigParse):
            RunConfig.from_dict(merge_config(DEFAULT_CONFIG, {"command": "solve"}))
        with self.assertRaises(ConfigParse):
            self.build(params={"n": 4, "mu": 0.0})

    def test_invalid_values(self):
        with self.assertRaises(ConfigParse):
            self.build(params=dict(PARAMS, q=0.5))
        with self.assertRaises(ConfigParse):
            self.build(manifold={"n": 5})
        with self.assertRaises(ConfigParse):
            self.build(solver={"grid_points": 2})
        with self.assertRaises(ConfigParse):
            self.build(output={"formats": ["xml"]})
        with self.assertRaises(ConfigParse):
            self.build(sweep={"jobs": -2})

    def test_sweep_request(self):
        run = self.build(sweep={"axis": "p", "values": [1, 2]})
        self.assertEqual(run.sweep_request(), ('p', (1.0, 2.0)))
        with self.assertRaises(UnknownAxis):
            self.build(sweep={"axis": "q", "values": [1.0]}).sweep_request()
        with self.assertRaises(EmptySweep):
            self.build(sweep={"axis": "mu", "values": []}).sweep_request()

    def test_reproducible_dict(self):
        first = self.build(sweep={"jobs": 1}, output={"dir": "a"}).reproducible_dict()
        second = self.build(sweep={"jobs": 8}, output={"dir": "b"}, logging={"level": "DEBUG"}).reproducible_dict()
        self.assertEqual(first, second)
        self.assertEqual(first['params'], PARAMS)


if __name__ == '__main__':
    unittest.main()

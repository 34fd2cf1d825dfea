import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "weyl_lab.settings.dev")
django.setup()


def pytest_sessionstart(session):
    from django.test.utils import setup_databases, setup_test_environment

    setup_test_environment()
    session._django_db_cfg = setup_databases(verbosity=0, interactive=False)


def pytest_sessionfinish(session, exitstatus):
    from django.test.utils import teardown_databases, teardown_test_environment

    cfg = getattr(session, "_django_db_cfg", None)
    if cfg is not None:
        teardown_databases(cfg, verbosity=0)
    teardown_test_environment()

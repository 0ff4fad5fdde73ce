from __future__ import annotations

import textwrap
from pathlib import Path

import pytest


def write_tree(root: Path, files: dict[str, str]) -> Path:
    for rel, text in files.items():
        target = root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(textwrap.dedent(text).lstrip("\n"), encoding="utf-8")
    return root


# A small package touching every relation kind the python adapter emits.
SHOP = {
    "shop/__init__.py": "",
    "shop/models.py": """
        class Base:
            def save(self):
                return self.validate()

            def validate(self):
                return True


        class Order(Base):
            def total(self):
                return compute_total(self)


        def compute_total(order):
            return 0
        """,
    "shop/service.py": """
        from shop.models import Order
        from . import pricing


        def checkout(cart):
            order = Order()
            order.save()
            return pricing.apply_discount(order)


        def refund(order):
            return order.total()
        """,
    "shop/pricing.py": """
        import shop.models


        def apply_discount(order):
            return shop.models.compute_total(order) * 0.9
        """,
    "tests/test_service.py": """
        from shop.service import checkout


        def test_checkout():
            assert checkout([]) is not None
        """,
    "docs/guide.md": """
        # Guide

        Call `checkout` from shop/service.py to place an order.
        """,
    "settings.toml": """
        [app]
        entry = "shop.service"
        """,
    "web/app.js": """
        import { api } from './api';
        const util = require('./util.js');
        """,
    "web/api.js": "export const api = 1;\n",
    "web/util.js": "module.exports = {};\n",
}


@pytest.fixture
def shop_repo(tmp_path: Path) -> Path:
    return write_tree(tmp_path / "shop_repo", SHOP)

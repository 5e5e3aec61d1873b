import pytest

from spanrule.corpus import GazetteerProvider, build_document
from spanrule.glm import ConceptElement, ConceptStore


@pytest.fixture
def review_store():
    store = ConceptStore()
    store.create("item")
    store.add_element("item", ConceptElement("token", "book"))
    store.add_element("item", ConceptElement("token", "electronics"))
    store.create("padj")
    store.add_element("padj", ConceptElement("token", "wonderful"))
    store.add_element("padj", ConceptElement("token", "great"))
    return store


@pytest.fixture
def review_doc():
    text = ("This book was so great! I loved and read it so many times "
            "that I will soon have to buy a new copy.")
    return build_document("d1", text, provider=GazetteerProvider())

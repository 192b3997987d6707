from datetime import datetime
from typing import List, Optional, Union

from ninja import Field, Schema
from pydantic import ConfigDict

# node ids may be written as JSON numbers
IDS_AS_STRINGS = ConfigDict(coerce_numbers_to_str=True)


class ErrorDetail(Schema):
    detail: str
    code: Optional[str] = None
    issues: List[dict] = []


class NodeIn(Schema):
    model_config = IDS_AS_STRINGS

    id: str
    position: Optional[List[float]] = None
    anchor: bool = False


class EdgeIn(Schema):
    model_config = IDS_AS_STRINGS

    tail: str
    head: str
    bearing: Optional[List[float]] = None


class NetworkIn(Schema):
    model_config = IDS_AS_STRINGS

    dimension: int
    nodes: List[NodeIn]
    edges: List[Union[EdgeIn, List[str]]] = []


class SavedNetworkIn(Schema):
    name: str
    network: NetworkIn


class NetworkOut(Schema):
    id: int
    name: str
    dimension: int
    digest: str
    nAnchors: int = Field(alias="n_anchors")
    nFollowers: int = Field(alias="n_followers")
    createdAt: datetime = Field(alias="created_at")


class NetworkDetailOut(NetworkOut):
    network: dict = Field(alias="payload")


class ValidationOut(Schema):
    valid: bool
    digest: str
    anchors: List[str]
    followers: List[str]
    edges: List[List[str]]

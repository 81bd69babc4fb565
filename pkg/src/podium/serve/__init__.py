from podium.serve.service import CoachService, ServiceConfig
from podium.serve.store import Store

__all__ = ["CoachService", "ServiceConfig", "Store"]

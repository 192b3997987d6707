from django.db import models

from .io import parse_network


class SavedNetwork(models.Model):
    name = models.CharField(max_length=100)
    dimension = models.PositiveSmallIntegerField()
    payload = models.JSONField()  # network description as submitted
    digest = models.CharField(max_length=64, db_index=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        return f"{self.name} ({self.digest[:12]})"

    @property
    def n_anchors(self):
        return sum(1 for node in self.payload.get("nodes", []) if node.get("anchor"))

    @property
    def n_followers(self):
        return len(self.payload.get("nodes", [])) - self.n_anchors

    def to_spec(self):
        return parse_network(self.payload)

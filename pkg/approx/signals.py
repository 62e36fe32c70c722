import json
import logging
from pathlib import Path

from django.db.models.signals import post_save
from django.dispatch import receiver

from .models import RunRecord
from .serializers import RunRecordSerializer

logger = logging.getLogger(__name__)


def render_manifest(record):
    return json.dumps(RunRecordSerializer(record).data, indent=2, sort_keys=True) + "\n"


@receiver(post_save, sender=RunRecord)
def write_manifest(sender, instance, created, **kwargs):
    if not instance.manifest_path:
        return
    path = Path(instance.manifest_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(render_manifest(instance))
    except OSError:
        logger.exception("could not write manifest %s", path)

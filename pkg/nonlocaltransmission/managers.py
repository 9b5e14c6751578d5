import logging
from typing import Iterable, Tuple

from django.db import models, transaction

from . import __title__
from .app_settings import NTL_BULK_METHODS_BATCH_SIZE
from .utils import LoggerAddTag

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


class RunRecordQuerySet(models.QuerySet):
    def failed(self) -> models.QuerySet:
        return self.exclude(exit_status=0)


class RunRecordManager(models.Manager):
    def get_queryset(self) -> RunRecordQuerySet:
        return RunRecordQuerySet(self.model, using=self._db)

    def record(
        self,
        *,
        subcommand: str,
        digest: str,
        seed: int,
        exit_status: int,
        summary: str,
        output_directory: str,
        sweep_rows: Iterable[Tuple[str, object]] = (),
    ):
        """Creates a run record together with its sweep rows."""
        from .models import SweepRowRecord

        with transaction.atomic():
            record = self.create(
                subcommand=subcommand,
                config_digest=digest,
                seed=seed,
                exit_status=exit_status,
                summary=summary,
                output_directory=output_directory,
            )
            rows = [
                SweepRowRecord(
                    run=record,
                    case=case,
                    position=position,
                    s=row.s,
                    delta=row.delta,
                    distance=row.distance,
                    weak_gap=row.weak_gap,
                    energy=row.energy,
                    limit_energy=row.limit_energy,
                )
                for position, (case, row) in enumerate(sweep_rows)
            ]
            SweepRowRecord.objects.bulk_create(
                rows, batch_size=NTL_BULK_METHODS_BATCH_SIZE
            )
        logger.info(
            "Recorded %s run with %d sweep rows, exit status %d",
            subcommand,
            len(rows),
            exit_status,
        )
        return record

    def for_digest(self, digest: str) -> models.QuerySet:
        """Earlier runs of the same configuration, newest first."""
        return self.filter(config_digest=digest).order_by("-created_at", "-pk")

    def purge(self) -> int:
        """Deletes all records. Returns the number of deleted runs."""
        with transaction.atomic():
            count = self.count()
            self.all().delete()
        return count

import logging

from django.core.management.base import BaseCommand

from ... import __title__
from ...models import RunRecord
from ...utils import LoggerAddTag
from . import get_input

logger = LoggerAddTag(logging.getLogger(__name__), __title__)


class Command(BaseCommand):
    help = "Removes all run records and their sweep rows from the database."

    def handle(self, *args, **options):
        self.stdout.write(
            "This command will delete {:,} run records. "
            "This can not be undone.".format(RunRecord.objects.count())
        )
        user_input = get_input("Are you sure you want to proceed? (y/N)?")
        if user_input.lower() == "y":
            count = RunRecord.objects.purge()
            logger.info("Purged %d run records", count)
            self.stdout.write(self.style.SUCCESS(f"Deleted {count:,} run records"))
        else:
            self.stdout.write(self.style.WARNING("Aborted"))

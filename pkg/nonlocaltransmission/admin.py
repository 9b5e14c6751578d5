from django.contrib import admin

from .models import RunRecord, SweepRowRecord


class ReadOnlyModelAdmin(admin.ModelAdmin):
    def has_add_permission(self, request):
        return False

    def has_change_permission(self, request, obj=None):
        return False

    def has_delete_permission(self, request, obj=None):
        return False


class SweepRowRecordInline(admin.TabularInline):
    model = SweepRowRecord
    fields = ("case", "position", "s", "delta", "distance", "weak_gap", "energy")
    readonly_fields = fields
    extra = 0
    can_delete = False

    def has_add_permission(self, request, obj=None):
        return False


@admin.register(RunRecord)
class RunRecordAdmin(ReadOnlyModelAdmin):
    list_display = ("pk", "subcommand", "exit_status", "seed", "created_at")
    list_filter = ("subcommand", "exit_status")
    search_fields = ("config_digest",)
    ordering = ["-created_at"]
    inlines = [SweepRowRecordInline]


@admin.register(SweepRowRecord)
class SweepRowRecordAdmin(ReadOnlyModelAdmin):
    list_display = ("run", "case", "position", "s", "delta", "distance")
    list_filter = ("case",)

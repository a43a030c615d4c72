"""agency and events tables

Revision ID: 0001
Revises:
Create Date: 2026-10-17 00:00:00

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa

revision: str = "0001"
down_revision: Union[str, None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    op.create_table(
        "agency",
        sa.Column("iata_id", sa.String(length=3), nullable=False),
        sa.Column("agency", sa.String(length=255), nullable=False),
        sa.Column("city", sa.String(length=128), nullable=False),
        sa.Column("country", sa.String(length=128), nullable=False),
        sa.Column("region", sa.String(length=128), nullable=False),
        sa.Column("continent", sa.String(length=128), nullable=False),
        sa.PrimaryKeyConstraint("iata_id"),
    )
    op.create_table(
        "events",
        sa.Column("id", sa.BigInteger().with_variant(sa.Integer(), "sqlite"), autoincrement=True, nullable=False),
        sa.Column("iata_id", sa.String(length=3), nullable=False),
        sa.Column("vehicle_id", sa.String(length=128), nullable=False),
        sa.Column("route_id", sa.String(length=128), nullable=True),
        sa.Column("trip_id", sa.String(length=128), nullable=True),
        sa.Column("latitude", sa.Double(), nullable=False),
        sa.Column("longitude", sa.Double(), nullable=False),
        sa.Column("datetime", sa.BigInteger(), nullable=False),
        sa.Column("duration", sa.Integer(), nullable=False),
        sa.ForeignKeyConstraint(["iata_id"], ["agency.iata_id"]),
        sa.PrimaryKeyConstraint("id"),
    )
    op.create_index("ix_events_iata_id", "events", ["iata_id"])
    op.create_index("ix_events_datetime_iata", "events", ["datetime", "iata_id"])


def downgrade() -> None:
    op.drop_index("ix_events_datetime_iata", table_name="events")
    op.drop_index("ix_events_iata_id", table_name="events")
    op.drop_table("events")
    op.drop_table("agency")

"""
Database models and operations for the sense-count cache.
Uses SQLAlchemy with SQLite so SemCor/OMSTI counts are ingested once and reloaded quickly.
"""

import logging
import os
from collections import Counter
from datetime import datetime
from typing import Iterable, List, Optional

from sqlalchemy import Column, DateTime, Integer, String, UniqueConstraint, create_engine, func
from sqlalchemy.orm import declarative_base, sessionmaker

from .heuristics import HeuristicStore
from .models import lemma_of_sense_key, pos_of_sense_key

logger = logging.getLogger(__name__)

Base = declarative_base()


class SenseCount(Base):
    """Count of one sense key in one training source (semcor, omsti, ...)"""
    __tablename__ = 'sense_counts'
    __table_args__ = (UniqueConstraint('source', 'sense_key', name='uq_source_sense_key'),)

    id = Column(Integer, primary_key=True)
    source = Column(String(50), nullable=False, index=True)
    sense_key = Column(String(200), nullable=False)
    lemma = Column(String(200), nullable=False, index=True)
    pos = Column(String(1), nullable=False)
    count = Column(Integer, nullable=False, default=0)
    created_at = Column(DateTime, default=datetime.utcnow)


# Database operations
def init_db(path: str):
    """
    Create the database file and tables if needed.

    Args:
        path: SQLite file path

    Returns:
        sessionmaker bound to the database
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    engine = create_engine(f'sqlite:///{path}', echo=False)
    Base.metadata.create_all(engine)
    return sessionmaker(bind=engine)


def save_store(session, store: HeuristicStore, source: Optional[str] = None) -> int:
    """Replace the rows of one source with the counts of a store. Returns the number of rows written."""
    label = source or store.source_label
    session.query(SenseCount).filter(SenseCount.source == label).delete()
    for sense_key, count in sorted(store.sense_count.items()):
        session.add(SenseCount(
            source=label,
            sense_key=sense_key,
            lemma=lemma_of_sense_key(sense_key),
            pos=pos_of_sense_key(sense_key).value,
            count=count,
        ))
    session.commit()
    logger.info("Cached %d sense counts for source '%s'", len(store), label)
    return len(store)


def load_store(session, sources: Iterable[str], source_label: Optional[str] = None) -> HeuristicStore:
    """Sum the cached counts of the given sources into one store."""
    sources = list(sources)
    counts: Counter = Counter()
    rows = session.query(SenseCount).filter(SenseCount.source.in_(sources)).all()
    for row in rows:
        counts[row.sense_key] += row.count
    missing = set(sources) - {row.source for row in rows}
    if missing:
        logger.warning("No cached counts for source(s): %s", ", ".join(sorted(missing)))
    return HeuristicStore(counts, source_label or "+".join(sources))


def get_sources(session) -> List[str]:
    """List the sources present in the cache"""
    return [row[0] for row in session.query(SenseCount.source).distinct().order_by(SenseCount.source)]


def get_source_total(session, source: str) -> int:
    """Total number of annotated occurrences cached for a source"""
    total = session.query(func.sum(SenseCount.count)).filter(SenseCount.source == source).scalar()
    return int(total or 0)

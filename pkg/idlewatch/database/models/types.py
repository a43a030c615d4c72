from typing import Annotated

from sqlalchemy import BigInteger, Double, Integer, String
from sqlalchemy.orm import mapped_column

# sqlite only autoincrements INTEGER PRIMARY KEY
bigint = BigInteger().with_variant(Integer(), "sqlite")

intpk = Annotated[int, mapped_column(bigint, primary_key=True, autoincrement=True)]
epoch = Annotated[int, mapped_column(BigInteger, nullable=False)]
seconds = Annotated[int, mapped_column(Integer, nullable=False)]
degrees = Annotated[float, mapped_column(Double, nullable=False)]

str_255 = Annotated[str, mapped_column(String(255), nullable=False)]
str_128 = Annotated[str, mapped_column(String(128), nullable=False)]
str_128_optional = Annotated[str | None, mapped_column(String(128), nullable=True)]

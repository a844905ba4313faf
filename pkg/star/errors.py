"""
Exceções usadas pelo simulador STAR.

Cada exceção carrega o código de saída que a CLI devolve quando ela escapa
até o topo (veja `star.cli.main`).
"""

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from lark import Token


class StarError(Exception):
    """
    Base de todas as exceções do pacote.
    """

    exit_code = 1


class ConfigError(StarError):
    """
    Erro no arquivo de configuração: arquivo ausente, sintaxe ou validação.

    Quando o erro vem de um valor específico do arquivo, `token` guarda o token
    do lark para reportar linha e coluna.
    """

    exit_code = 2

    def __init__(self, msg, token: "Token | None" = None):
        if token is not None and getattr(token, "line", None) is not None:
            msg = f"{msg} (linha {token.line}, coluna {token.column})"
        super().__init__(msg)
        self.token = token


class LayoutError(StarError, ValueError):
    """
    Índice ou dimensão incompatível com o layout do espaço de Hilbert.
    """


class DomainError(StarError, ValueError):
    """
    Argumento fora do domínio da operação (ex.: sqrtm de matriz não PSD).
    """


class HygieneError(StarError):
    """
    Simulação numericamente inválida: população no último nível de Fock,
    deriva de traço ou autovalor negativo acima da tolerância.
    """

    exit_code = 3


class ResourceError(StarError):
    """
    Dimensão do estado acima do limite configurado. Lançada antes da alocação.
    """

    exit_code = 3


class IntegrationError(StarError):
    """
    Falha do integrador (ex.: passo adaptativo abaixo do mínimo).
    """

    exit_code = 3


class FitError(StarError):
    """
    Dados sem informação para o ajuste (grade degenerada, varredura plana).
    """
